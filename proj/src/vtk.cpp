#include "lattice_fe2/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace latfe2
{
	namespace
	{
		std::string fmt(double v)
		{
			char buf[32];
			std::snprintf(buf, sizeof buf, "%.9g", v);
			return buf;
		}

		void header(std::ostream &os, const std::string &title, const Points2<double> &nodes)
		{
			os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
			os << "POINTS " << nodes.rows() << " double\n";
			for (Eigen::Index n = 0; n < nodes.rows(); ++n)
				os << fmt(nodes(n, 0)) << ' ' << fmt(nodes(n, 1)) << " 0\n";
		}

		void displacement(std::ostream &os, const Eigen::VectorXd &u, Eigen::Index n_nodes)
		{
			if (u.size() != 2 * n_nodes)
				throw InputError("vtk: displacement size does not match the node count");
			os << "POINT_DATA " << n_nodes << "\nVECTORS displacement double\n";
			for (Eigen::Index n = 0; n < n_nodes; ++n)
				os << fmt(u(2 * n)) << ' ' << fmt(u(2 * n + 1)) << " 0\n";
		}

		std::ofstream open(const std::string &path)
		{
			std::ofstream os(path, std::ios::binary);
			if (!os)
				throw InputError("cannot write '" + path + "'");
			return os;
		}
	} // namespace

	void write_vtk_mesh(std::ostream &os, const QuadMesh &mesh, const Eigen::VectorXd &u, const std::string &title)
	{
		header(os, title, mesh.nodes);
		const auto ne = mesh.elements.size();
		os << "CELLS " << ne << ' ' << 5 * ne << '\n';
		for (const auto &e : mesh.elements)
			os << "4 " << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << e[3] << '\n';
		os << "CELL_TYPES " << ne << '\n';
		for (std::size_t e = 0; e < ne; ++e)
			os << "9\n";
		displacement(os, u, mesh.nodes.rows());
	}

	void write_vtk_lattice(std::ostream &os, const DnsLattice &lattice, const Eigen::VectorXd &u,
						   const std::vector<bool> &yielded, const std::string &title)
	{
		header(os, title, lattice.nodes);
		const auto ns = lattice.struts.size();
		os << "CELLS " << ns << ' ' << 3 * ns << '\n';
		for (const auto &s : lattice.struts)
			os << "2 " << s.i << ' ' << s.j << '\n';
		os << "CELL_TYPES " << ns << '\n';
		for (std::size_t e = 0; e < ns; ++e)
			os << "3\n";
		if (!yielded.empty())
		{
			if (yielded.size() != ns)
				throw InputError("vtk: one yield flag per strut is required");
			os << "CELL_DATA " << ns << "\nSCALARS yielded int 1\nLOOKUP_TABLE default\n";
			for (bool y : yielded)
				os << (y ? 1 : 0) << '\n';
		}
		displacement(os, u, lattice.nodes.rows());
	}

	void write_vtk_mesh(const std::string &path, const QuadMesh &mesh, const Eigen::VectorXd &u)
	{
		auto os = open(path);
		write_vtk_mesh(os, mesh, u);
	}

	void write_vtk_lattice(const std::string &path, const DnsLattice &lattice, const Eigen::VectorXd &u,
						   const std::vector<bool> &yielded)
	{
		auto os = open(path);
		write_vtk_lattice(os, lattice, u, yielded);
	}

	void write_yield_map_csv(const std::string &path, const DnsLattice &lattice, const std::vector<bool> &yielded)
	{
		if (yielded.size() != lattice.struts.size())
			throw InputError("yield map: one flag per strut is required");
		auto os = open(path);
		os << "strut,x1,y1,x2,y2,yielded\n";
		for (std::size_t e = 0; e < yielded.size(); ++e)
		{
			const auto &s = lattice.struts[e];
			os << e << ',' << fmt(lattice.nodes(s.i, 0)) << ',' << fmt(lattice.nodes(s.i, 1)) << ','
			   << fmt(lattice.nodes(s.j, 0)) << ',' << fmt(lattice.nodes(s.j, 1)) << ',' << (yielded[e] ? 1 : 0) << '\n';
		}
	}
} // namespace latfe2
