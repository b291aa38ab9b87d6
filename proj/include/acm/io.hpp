#pragma once

#include <Eigen/Dense>
#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "acm/datagen.hpp"

namespace acm {

namespace detail {

inline std::runtime_error parse_error(const std::string& path, std::size_t line,
                                      const std::string& msg) {
    return std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

inline std::vector<std::vector<double>> read_csv_rows(const std::string& path,
                                                      const std::string& header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw parse_error(path, 1, "missing header");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw parse_error(path, 1, "expected header '" + header + "'");
    const std::size_t ncols = split_csv(header).size();
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != ncols)
            throw parse_error(path, lineno, "expected " + std::to_string(ncols) + " fields");
        std::vector<double> row;
        row.reserve(ncols);
        for (const std::string& f : fields) {
            try {
                row.push_back(std::stod(f));
            } catch (const std::exception&) {
                throw parse_error(path, lineno, "not a number: '" + f + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    return out;
}

}  // namespace detail

inline void write_resection_csv(const std::string& path, const std::vector<Corr3D2D>& corrs) {
    auto out = detail::open_out(path);
    out << "px,py,pz,ux,uy\n";
    for (const Corr3D2D& c : corrs)
        out << c.p.x() << ',' << c.p.y() << ',' << c.p.z() << ',' << c.u.x() << ',' << c.u.y()
            << '\n';
}

inline std::vector<Corr3D2D> read_resection_csv(const std::string& path) {
    std::vector<Corr3D2D> corrs;
    for (const auto& r : detail::read_csv_rows(path, "px,py,pz,ux,uy"))
        corrs.push_back({{r[0], r[1], r[2]}, {r[3], r[4]}});
    return corrs;
}

inline void write_planar_csv(const std::string& path, const std::vector<Corr2D2D>& corrs) {
    auto out = detail::open_out(path);
    out << "u1,v1,u2,v2\n";
    for (const Corr2D2D& c : corrs)
        out << c.x1.x() << ',' << c.x1.y() << ',' << c.x2.x() << ',' << c.x2.y() << '\n';
}

inline std::vector<Corr2D2D> read_planar_csv(const std::string& path) {
    std::vector<Corr2D2D> corrs;
    for (const auto& r : detail::read_csv_rows(path, "u1,v1,u2,v2"))
        corrs.push_back({{r[0], r[1]}, {r[2], r[3]}});
    return corrs;
}

/** One-row ground-truth sidecar for planar instances. */
inline void write_planar_gt_csv(const std::string& path, double theta, double phi) {
    auto out = detail::open_out(path);
    out << "theta,phi\n" << theta << ',' << phi << '\n';
}

inline std::pair<double, double> read_planar_gt_csv(const std::string& path) {
    const auto rows = detail::read_csv_rows(path, "theta,phi");
    if (rows.size() != 1) throw std::runtime_error(path + ": expected exactly one row");
    return {rows[0][0], rows[0][1]};
}

inline void write_reg3d_csv(const std::string& path, const std::vector<Corr3D3D>& corrs) {
    auto out = detail::open_out(path);
    out << "px,py,pz,qx,qy,qz\n";
    for (const Corr3D3D& c : corrs)
        out << c.p.x() << ',' << c.p.y() << ',' << c.p.z() << ',' << c.q.x() << ',' << c.q.y()
            << ',' << c.q.z() << '\n';
}

inline std::vector<Corr3D3D> read_reg3d_csv(const std::string& path) {
    std::vector<Corr3D3D> corrs;
    for (const auto& r : detail::read_csv_rows(path, "px,py,pz,qx,qy,qz"))
        corrs.push_back({{r[0], r[1], r[2]}, {r[3], r[4], r[5]}});
    return corrs;
}

inline void write_xyz_csv(const std::string& path, const std::vector<Eigen::Vector3d>& pts) {
    auto out = detail::open_out(path);
    out << "x,y,z\n";
    for (const Eigen::Vector3d& p : pts) out << p.x() << ',' << p.y() << ',' << p.z() << '\n';
}

inline std::vector<Eigen::Vector3d> read_xyz_csv(const std::string& path) {
    std::vector<Eigen::Vector3d> pts;
    for (const auto& r : detail::read_csv_rows(path, "x,y,z")) pts.push_back({r[0], r[1], r[2]});
    return pts;
}

/**
 * ASCII PLY vertex loader. Reads x/y/z properties of the vertex element and
 * ignores everything else; parse failures report the offending line number.
 */
inline std::vector<Eigen::Vector3d> load_ply(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;

    auto next_line = [&]() {
        if (!std::getline(in, line)) throw detail::parse_error(path, lineno + 1, "unexpected end of file");
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    if (next_line() != "ply") throw detail::parse_error(path, lineno, "missing 'ply' magic");

    long long n_vertices = -1;
    int x_col = -1, y_col = -1, z_col = -1;
    int prop_col = 0;
    bool in_vertex_element = false;
    bool ascii = false;
    while (next_line() != "end_header") {
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "format") {
            std::string fmt;
            ss >> fmt;
            if (fmt != "ascii") throw detail::parse_error(path, lineno, "only ascii format supported");
            ascii = true;
        } else if (tok == "element") {
            std::string name;
            long long count = 0;
            ss >> name >> count;
            in_vertex_element = (name == "vertex");
            if (in_vertex_element) {
                n_vertices = count;
                prop_col = 0;
            }
        } else if (tok == "property" && in_vertex_element) {
            std::string type, name;
            ss >> type >> name;
            if (type == "list") throw detail::parse_error(path, lineno, "list property in vertex element");
            if (name == "x") x_col = prop_col;
            if (name == "y") y_col = prop_col;
            if (name == "z") z_col = prop_col;
            ++prop_col;
        }
    }
    if (!ascii) throw detail::parse_error(path, lineno, "missing format line");
    if (n_vertices < 0) throw detail::parse_error(path, lineno, "missing vertex element");
    if (x_col < 0 || y_col < 0 || z_col < 0)
        throw detail::parse_error(path, lineno, "vertex element lacks x/y/z properties");

    std::vector<Eigen::Vector3d> pts;
    pts.reserve(static_cast<std::size_t>(n_vertices));
    for (long long i = 0; i < n_vertices; ++i) {
        next_line();
        std::istringstream ss(line);
        std::vector<double> vals;
        double v;
        while (ss >> v) vals.push_back(v);
        if (static_cast<int>(vals.size()) < prop_col)
            throw detail::parse_error(path, lineno, "expected " + std::to_string(prop_col) + " values");
        pts.push_back({vals[static_cast<std::size_t>(x_col)], vals[static_cast<std::size_t>(y_col)],
                       vals[static_cast<std::size_t>(z_col)]});
    }
    return pts;
}

inline void write_ply(const std::string& path, const std::vector<Eigen::Vector3d>& pts) {
    auto out = detail::open_out(path);
    out << "ply\nformat ascii 1.0\nelement vertex " << pts.size()
        << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    for (const Eigen::Vector3d& p : pts) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

/** Voxel-grid downsampling to per-voxel centroids; voxel <= 0 is identity. */
inline std::vector<Eigen::Vector3d> downsample_voxel(const std::vector<Eigen::Vector3d>& pts,
                                                     double voxel) {
    if (voxel <= 0.0) return pts;
    std::map<std::array<long long, 3>, std::pair<Eigen::Vector3d, int>> cells;
    for (const Eigen::Vector3d& p : pts) {
        const std::array<long long, 3> key = {static_cast<long long>(std::floor(p.x() / voxel)),
                                              static_cast<long long>(std::floor(p.y() / voxel)),
                                              static_cast<long long>(std::floor(p.z() / voxel))};
        auto [it, fresh] = cells.try_emplace(key, Eigen::Vector3d::Zero(), 0);
        it->second.first += p;
        it->second.second += 1;
    }
    std::vector<Eigen::Vector3d> out;
    out.reserve(cells.size());
    for (const auto& [key, acc] : cells) out.push_back(acc.first / acc.second);
    return out;
}

}  // namespace acm
