#pragma once

#include "lattice_fe2/dns.hpp"
#include "lattice_fe2/macrofe.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace latfe2
{
	/// Legacy ASCII unstructured grid with a "displacement" point vector field.
	void write_vtk_mesh(std::ostream &os, const QuadMesh &mesh, const Eigen::VectorXd &u, const std::string &title = "macro");
	void write_vtk_lattice(std::ostream &os, const DnsLattice &lattice, const Eigen::VectorXd &u,
						   const std::vector<bool> &yielded = {}, const std::string &title = "lattice");

	void write_vtk_mesh(const std::string &path, const QuadMesh &mesh, const Eigen::VectorXd &u);
	void write_vtk_lattice(const std::string &path, const DnsLattice &lattice, const Eigen::VectorXd &u,
						   const std::vector<bool> &yielded = {});

	/// CSV of strut end points and a 0/1 yielded column.
	void write_yield_map_csv(const std::string &path, const DnsLattice &lattice, const std::vector<bool> &yielded);
} // namespace latfe2
