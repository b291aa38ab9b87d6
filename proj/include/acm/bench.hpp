#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "acm/datagen.hpp"
#include "acm/engine.hpp"
#include "acm/geometry.hpp"
#include "acm/io.hpp"
#include "acm/planar2d.hpp"
#include "acm/reg3d.hpp"
#include "acm/resection1d.hpp"

namespace acm {

/** One solver execution on one generated instance. */
struct RunRecord {
    std::string problem;
    std::string method;
    double sweep_value = 0.0;
    int trial = 0;
    bool ok = true;
    std::string message;
    double build_time_s = 0.0;
    double time_s = 0.0;
    long iterations = 0;
    int cardinality = 0;
    double err_primary = std::numeric_limits<double>::quiet_NaN();
    double err_secondary = std::numeric_limits<double>::quiet_NaN();
};

/** Aggregates over the trials of one (sweep value, method) cell. */
struct SummaryRow {
    std::string problem;
    std::string method;
    double sweep_value = 0.0;
    int trials = 0;
    double mean_time_s = 0.0;
    double median_time_s = 0.0;
    double mean_iterations = 0.0;
    double mean_cardinality = 0.0;
    double mean_err_primary = std::numeric_limits<double>::quiet_NaN();
    double mean_err_secondary = std::numeric_limits<double>::quiet_NaN();
};

struct SpeedupRow {
    std::string problem;
    double sweep_value = 0.0;
    double time_ratio = 0.0;       // plain / acm
    double iteration_ratio = 0.0;  // plain / acm
};

struct Summary {
    std::vector<SummaryRow> rows;
    std::vector<SpeedupRow> speedups;
};

/**
 * Sweep syntax: comma-separated segments, each a single value or
 * start:end:step (end inclusive up to rounding). Example:
 * "0.1:0.9:0.1,0.91:0.95:0.01" yields 14 values.
 */
inline std::vector<double> parse_sweep(const std::string& text) {
    std::vector<double> values;
    std::istringstream ss(text);
    std::string seg;
    while (std::getline(ss, seg, ',')) {
        if (seg.empty()) continue;
        const std::size_t c1 = seg.find(':');
        if (c1 == std::string::npos) {
            values.push_back(std::stod(seg));
            continue;
        }
        const std::size_t c2 = seg.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw std::invalid_argument("sweep segment needs start:end:step: " + seg);
        const double start = std::stod(seg.substr(0, c1));
        const double end = std::stod(seg.substr(c1 + 1, c2 - c1 - 1));
        const double step = std::stod(seg.substr(c2 + 1));
        if (step <= 0.0) throw std::invalid_argument("sweep step must be positive: " + seg);
        for (int i = 0;; ++i) {
            const double v = start + step * i;
            if (v > end + 0.5 * step) break;
            values.push_back(std::min(v, end));
        }
    }
    return values;
}

/** Instance seed for (sweep index, trial), decorrelated from the base seed. */
inline std::uint64_t derive_seed(std::uint64_t base, std::size_t sweep_index, int trial) {
    return Rng(base).stream(sweep_index).stream(static_cast<std::uint64_t>(trial)).next_u64();
}

/** Worker count: ACM_THREADS when set, else hardware concurrency. */
inline unsigned bench_threads() {
    if (const char* env = std::getenv("ACM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

struct BenchConfig {
    std::string problem;  // resection1d | planar2d | reg3d-corr | reg3d-corrless
    std::string method = "both";
    std::vector<double> sweep;  // outlier ratios, or overlap fractions for corrless
    int trials = 10;
    double eps = 0.2;
    double tau_frac = 0.1;  // corrless: tau = tau_frac * eps
    int max_depth = 10;
    std::size_t keep_pairs = 1000;
    bool corrless_union = false;  // join the two relaxed windows instead of intersecting
    SceneConfig scene;
    std::optional<Cube> cube;  // translation box override for the 3D problems
    std::string ply_path;      // corrless: real point cloud instead of synthetic
    double voxel = 0.0;
    std::string trace_path;
};

namespace detail {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

inline Cube cube_from(const std::optional<Cube>& override_cube, const Cube& fallback,
                      std::size_t dims) {
    Cube base = override_cube ? *override_cube : fallback;
    Cube out;
    out.lo.assign(base.lo.begin(), base.lo.begin() + static_cast<long>(dims));
    out.hi.assign(base.hi.begin(), base.hi.begin() + static_cast<long>(dims));
    return out;
}

inline double deg(double rad) { return rad * 180.0 / kPi; }

inline void maybe_write_trace(const BenchConfig& cfg, const std::string& method,
                              const std::vector<TraceRow>& trace) {
    if (cfg.trace_path.empty() || trace.empty()) return;
    std::string path = cfg.trace_path;
    if (cfg.method == "both") {
        const std::size_t dot = path.rfind('.');
        const std::string tag = "." + method;
        if (dot == std::string::npos)
            path += tag;
        else
            path.insert(dot, tag);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_trace_csv(out, trace);
}

/** Runs one (sweep value, trial) job; records for each requested method. */
inline std::vector<RunRecord> run_one(const BenchConfig& cfg,
                                      const std::vector<Eigen::Vector3d>& ply_cloud,
                                      std::size_t sweep_index, int trial) {
    const double sweep_value = cfg.sweep[sweep_index];
    const bool want_plain = cfg.method == "plain" || cfg.method == "both";
    const bool want_acm = cfg.method == "acm" || cfg.method == "both";
    const bool record_trace = !cfg.trace_path.empty() && sweep_index == 0 && trial == 0;

    SceneConfig scene = cfg.scene;
    scene.seed = derive_seed(cfg.scene.seed, sweep_index, trial);
    scene.outlier_ratio = sweep_value;

    std::vector<RunRecord> out;
    auto base_record = [&](const std::string& method) {
        RunRecord r;
        r.problem = cfg.problem;
        r.method = method;
        r.sweep_value = sweep_value;
        r.trial = trial;
        return r;
    };

    SolveOptions opts;
    opts.max_depth = cfg.max_depth;
    opts.record_trace = record_trace;

    if (cfg.problem == "resection1d") {
        const ResectionInstance inst = gen_resection(scene);
        Timer tb;
        const std::vector<TimConstraint> tims = build_tims(inst.corrs, inst.prior);
        const double build_s = tb.seconds();
        if (want_plain) {
            RunRecord r = base_record("plain");
            r.build_time_s = build_s;
            const SolveReport rep = solve_plain1d(tims, cfg.eps, opts);
            r.time_s = rep.wall_time;
            r.iterations = rep.iterations;
            r.cardinality = rep.best_count;
            r.err_primary = deg(angle_dist(rep.best_param[0], inst.alpha_gt));
            maybe_write_trace(cfg, "plain", rep.trace);
            out.push_back(r);
        }
        if (want_acm) {
            RunRecord r = base_record("acm");
            r.build_time_s = build_s;
            Timer ts;
            const Acm0Result res = solve_acm0(tims, cfg.eps);
            r.time_s = ts.seconds();
            r.iterations = 1;
            r.cardinality = res.count;
            r.err_primary = deg(angle_dist(res.alpha, inst.alpha_gt));
            out.push_back(r);
        }
        return out;
    }

    if (cfg.problem == "planar2d") {
        const PlanarInstance inst = gen_planar(scene);
        Timer tb;
        const std::vector<PlanarConstraint> cons = build_planar_all(inst.corrs);
        const double build_s = tb.seconds();
        auto fill = [&](RunRecord& r, const SolveReport& rep) {
            r.build_time_s = build_s;
            r.time_s = rep.wall_time;
            r.iterations = rep.iterations;
            r.cardinality = rep.best_count;
            if (rep.best_param.size() < 2) return;
            const double theta = rep.best_param[0] + rep.best_param[1];
            const double phi = rep.best_param[1];
            r.err_primary = deg(angle_dist(theta, inst.theta_gt));
            r.err_secondary =
                deg(std::min(angle_dist(phi, inst.phi_gt), angle_dist(phi, inst.phi_gt + kPi)));
        };
        if (want_plain) {
            RunRecord r = base_record("plain");
            const SolveReport rep = solve_planar_plain(cons, cfg.eps, opts);
            fill(r, rep);
            maybe_write_trace(cfg, "plain", rep.trace);
            out.push_back(r);
        }
        if (want_acm) {
            RunRecord r = base_record("acm");
            const SolveReport rep = solve_planar_acm1(cons, cfg.eps, opts);
            fill(r, rep);
            maybe_write_trace(cfg, "acm", rep.trace);
            out.push_back(r);
        }
        return out;
    }

    if (cfg.problem == "reg3d-corr") {
        const Reg3dCorrInstance inst = gen_reg3d_corr(scene);
        std::vector<Eigen::Vector3d> ps, qs;
        for (const Corr3D3D& c : inst.corrs) {
            ps.push_back(c.p);
            qs.push_back(c.q);
        }
        const Cube box3 = cube_from(cfg.cube, default_translation_cube(ps, qs, cfg.eps), 3);
        auto fill = [&](RunRecord& r, const SolveReport& rep) {
            r.time_s = rep.wall_time;
            r.iterations = rep.iterations;
            r.cardinality = rep.best_count;
            if (rep.best_param.size() < 3) return;
            const Eigen::Vector3d t(rep.best_param[0], rep.best_param[1], rep.best_param[2]);
            r.err_primary = (t - inst.t_gt).norm() / std::max(inst.t_gt.norm(), 1e-12);
        };
        if (want_plain) {
            RunRecord r = base_record("plain");
            PlainCorrBounder bounder(inst.corrs, cfg.eps);
            const SolveReport rep = solve(bounder, box3, opts);
            fill(r, rep);
            maybe_write_trace(cfg, "plain", rep.trace);
            out.push_back(r);
        }
        if (want_acm) {
            RunRecord r = base_record("acm");
            AcmCorrBounder bounder(inst.corrs, cfg.eps);
            const SolveReport rep = solve(bounder, cube_from(cfg.cube, box3, 2), opts);
            fill(r, rep);
            maybe_write_trace(cfg, "acm", rep.trace);
            out.push_back(r);
        }
        return out;
    }

    if (cfg.problem == "reg3d-corrless") {
        std::vector<Eigen::Vector3d> pset, qset;
        Eigen::Vector3d t_gt;
        if (!ply_cloud.empty()) {
            pset = ply_cloud;
            Rng rng(scene.seed);
            Rng motion = rng.stream(0);
            Rng crop = rng.stream(1);
            const Eigen::Vector3d axis(motion.uniform(0.0, 1.0), motion.uniform(0.0, 1.0),
                                       motion.uniform(0.0, 1.0));
            const Eigen::Matrix3d r_gt = axis_angle(axis, motion.uniform(-kPi, kPi));
            t_gt = {motion.uniform(-1.0, 1.0), motion.uniform(-1.0, 1.0),
                    motion.uniform(-1.0, 1.0)};
            for (const Eigen::Vector3d& p : crop_halfspace(pset, sweep_value, crop))
                qset.push_back(r_gt * (p + t_gt));
        } else {
            const CorrlessInstance inst = gen_reg3d_corrless(scene, sweep_value);
            pset = inst.pset;
            qset = inst.qset;
            t_gt = inst.t_gt;
        }
        Timer tb;
        const std::vector<RiPair> pairs =
            build_ri_pairs(pset, qset, cfg.tau_frac * cfg.eps, cfg.keep_pairs);
        const double build_s = tb.seconds();
        const Cube box3 = cube_from(cfg.cube, default_translation_cube(pset, qset, cfg.eps), 3);
        auto fill = [&](RunRecord& r, const SolveReport& rep) {
            r.build_time_s = build_s;
            r.time_s = rep.wall_time;
            r.iterations = rep.iterations;
            r.cardinality = rep.best_count;
            if (rep.best_param.size() < 3) return;
            const Eigen::Vector3d t(rep.best_param[0], rep.best_param[1], rep.best_param[2]);
            r.err_primary = (t - t_gt).norm() / std::max(t_gt.norm(), 1e-12);
        };
        if (want_plain) {
            RunRecord r = base_record("plain");
            PlainCorrlessBounder bounder(pairs, cfg.eps);
            const SolveReport rep = solve(bounder, box3, opts);
            fill(r, rep);
            maybe_write_trace(cfg, "plain", rep.trace);
            out.push_back(r);
        }
        if (want_acm) {
            RunRecord r = base_record("acm");
            AcmCorrlessBounder bounder(pairs, cfg.eps, cfg.corrless_union);
            const SolveReport rep = solve(bounder, cube_from(cfg.cube, box3, 2), opts);
            fill(r, rep);
            maybe_write_trace(cfg, "acm", rep.trace);
            out.push_back(r);
        }
        return out;
    }

    throw std::invalid_argument("unknown problem: " + cfg.problem);
}

}  // namespace detail

/**
 * Runs the full sweep. Both methods of a job share one instance, so records
 * pair up by (sweep_value, trial). Jobs run on a pool bounded by ACM_THREADS
 * and results are merged in job order regardless of completion order.
 */
inline std::vector<RunRecord> run_bench(const BenchConfig& cfg) {
    if (cfg.sweep.empty()) throw std::invalid_argument("empty sweep");
    if (cfg.problem != "resection1d" && cfg.problem != "planar2d" && cfg.problem != "reg3d-corr" &&
        cfg.problem != "reg3d-corrless")
        throw std::invalid_argument("unknown problem: " + cfg.problem);
    if (cfg.method != "plain" && cfg.method != "acm" && cfg.method != "both")
        throw std::invalid_argument("unknown method: " + cfg.method);

    std::vector<Eigen::Vector3d> ply_cloud;
    if (!cfg.ply_path.empty()) ply_cloud = downsample_voxel(load_ply(cfg.ply_path), cfg.voxel);

    struct Job {
        std::size_t sweep_index;
        int trial;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < cfg.sweep.size(); ++s)
        for (int t = 0; t < cfg.trials; ++t) jobs.push_back({s, t});

    std::vector<std::vector<RunRecord>> results(jobs.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t j = cursor.fetch_add(1);
            if (j >= jobs.size()) return;
            try {
                results[j] = detail::run_one(cfg, ply_cloud, jobs[j].sweep_index, jobs[j].trial);
            } catch (const std::exception& e) {
                RunRecord r;
                r.problem = cfg.problem;
                r.method = cfg.method;
                r.sweep_value = cfg.sweep[jobs[j].sweep_index];
                r.trial = jobs[j].trial;
                r.ok = false;
                r.message = e.what();
                results[j] = {r};
            }
        }
    };

    const unsigned n_threads = std::min<std::size_t>(bench_threads(), jobs.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    std::vector<RunRecord> flat;
    for (const auto& batch : results)
        for (const RunRecord& r : batch) flat.push_back(r);
    return flat;
}

inline Summary summarize(const std::vector<RunRecord>& records) {
    std::map<std::tuple<std::string, double, std::string>, std::vector<const RunRecord*>> cells;
    for (const RunRecord& r : records)
        if (r.ok) cells[{r.problem, r.sweep_value, r.method}].push_back(&r);

    Summary summary;
    for (const auto& [key, rs] : cells) {
        SummaryRow row;
        row.problem = std::get<0>(key);
        row.sweep_value = std::get<1>(key);
        row.method = std::get<2>(key);
        row.trials = static_cast<int>(rs.size());
        std::vector<double> times;
        double it_sum = 0.0, card_sum = 0.0, e1_sum = 0.0, e2_sum = 0.0;
        int e1_n = 0, e2_n = 0;
        for (const RunRecord* r : rs) {
            times.push_back(r->time_s);
            it_sum += static_cast<double>(r->iterations);
            card_sum += r->cardinality;
            if (std::isfinite(r->err_primary)) {
                e1_sum += r->err_primary;
                ++e1_n;
            }
            if (std::isfinite(r->err_secondary)) {
                e2_sum += r->err_secondary;
                ++e2_n;
            }
        }
        std::sort(times.begin(), times.end());
        for (double t : times) row.mean_time_s += t;
        row.mean_time_s /= static_cast<double>(times.size());
        row.median_time_s = times[times.size() / 2];
        row.mean_iterations = it_sum / static_cast<double>(rs.size());
        row.mean_cardinality = card_sum / static_cast<double>(rs.size());
        if (e1_n > 0) row.mean_err_primary = e1_sum / e1_n;
        if (e2_n > 0) row.mean_err_secondary = e2_sum / e2_n;
        summary.rows.push_back(row);
    }

    std::map<std::pair<std::string, double>, std::pair<const SummaryRow*, const SummaryRow*>> by_cell;
    for (const SummaryRow& row : summary.rows) {
        auto& slot = by_cell[{row.problem, row.sweep_value}];
        if (row.method == "plain") slot.first = &row;
        if (row.method == "acm") slot.second = &row;
    }
    for (const auto& [key, pair] : by_cell) {
        if (!pair.first || !pair.second) continue;
        SpeedupRow s;
        s.problem = key.first;
        s.sweep_value = key.second;
        s.time_ratio = pair.first->mean_time_s / std::max(pair.second->mean_time_s, 1e-12);
        s.iteration_ratio =
            pair.first->mean_iterations / std::max(pair.second->mean_iterations, 1e-12);
        summary.speedups.push_back(s);
    }
    return summary;
}

/**
 * Fixed column order:
 * problem,method,sweep_value,trial,status,build_time_s,time_s,iterations,
 * cardinality,err_primary,err_secondary,message
 */
inline void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records) {
    os.precision(17);
    os << "problem,method,sweep_value,trial,status,build_time_s,time_s,iterations,cardinality,"
          "err_primary,err_secondary,message\n";
    for (const RunRecord& r : records) {
        std::string msg = r.message;
        for (char& c : msg)
            if (c == ',' || c == '\n') c = ';';
        os << r.problem << ',' << r.method << ',' << r.sweep_value << ',' << r.trial << ','
           << (r.ok ? "ok" : "error") << ',' << r.build_time_s << ',' << r.time_s << ','
           << r.iterations << ',' << r.cardinality << ',' << r.err_primary << ','
           << r.err_secondary << ',' << msg << '\n';
    }
}

inline nlohmann::json summary_to_json(const Summary& summary) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["rows"] = nlohmann::json::array();
    for (const SummaryRow& r : summary.rows) {
        nlohmann::json row;
        row["problem"] = r.problem;
        row["method"] = r.method;
        row["sweep_value"] = r.sweep_value;
        row["trials"] = r.trials;
        row["mean_time_s"] = r.mean_time_s;
        row["median_time_s"] = r.median_time_s;
        row["mean_iterations"] = r.mean_iterations;
        row["mean_cardinality"] = r.mean_cardinality;
        if (std::isfinite(r.mean_err_primary)) row["mean_err_primary"] = r.mean_err_primary;
        if (std::isfinite(r.mean_err_secondary)) row["mean_err_secondary"] = r.mean_err_secondary;
        j["rows"].push_back(row);
    }
    j["speedups"] = nlohmann::json::array();
    for (const SpeedupRow& s : summary.speedups) {
        nlohmann::json row;
        row["problem"] = s.problem;
        row["sweep_value"] = s.sweep_value;
        row["time_ratio"] = s.time_ratio;
        row["iteration_ratio"] = s.iteration_ratio;
        j["speedups"].push_back(row);
    }
    return j;
}

}  // namespace acm
