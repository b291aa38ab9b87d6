#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "acm/bench.hpp"

namespace {

struct CommonArgs {
    acm::BenchConfig cfg;
    std::string sweep_text;
    std::string out_path;
    std::string summary_path;
    std::vector<double> cube_bounds;
};

void add_bench_flags(CLI::App* app, CommonArgs& args, const std::string& default_sweep,
                     double default_eps) {
    args.sweep_text = default_sweep;
    args.cfg.eps = default_eps;
    app->add_option("--method", args.cfg.method, "plain | acm | both")
        ->check(CLI::IsMember({"plain", "acm", "both"}))
        ->capture_default_str();
    app->add_option("--sweep", args.sweep_text,
                    "comma-separated values or start:end:step segments")
        ->capture_default_str();
    app->add_option("--trials", args.cfg.trials, "instances per sweep value")
        ->capture_default_str();
    app->add_option("--points", args.cfg.scene.n_points, "points per instance")
        ->capture_default_str();
    app->add_option("--eps", args.cfg.eps, "inlier residual threshold")->capture_default_str();
    app->add_option("--max-depth", args.cfg.max_depth, "branch depth limit")
        ->capture_default_str();
    app->add_option("--seed", args.cfg.scene.seed, "base seed")->capture_default_str();
    app->add_option("--noise-px", args.cfg.scene.noise_px, "image noise in pixels")
        ->capture_default_str();
    app->add_option("--noise-sigma", args.cfg.scene.noise_sigma, "3D point noise stddev")
        ->capture_default_str();
    app->add_option("--cube", args.cube_bounds,
                    "translation box as lo hi (all axes) or lo1 hi1 lo2 hi2 lo3 hi3")
        ->expected(2, 6);
    app->add_option("--out", args.out_path, "per-run records CSV");
    app->add_option("--summary", args.summary_path, "aggregate summary JSON");
    app->add_option("--trace", args.cfg.trace_path,
                    "bound trace CSV of the first job (method tag inserted when --method both)");
}

void finish_bench(CommonArgs& args) {
    args.cfg.sweep = acm::parse_sweep(args.sweep_text);
    if (!args.cube_bounds.empty()) {
        acm::Cube cube;
        if (args.cube_bounds.size() == 2) {
            for (int k = 0; k < 3; ++k) {
                cube.lo.push_back(args.cube_bounds[0]);
                cube.hi.push_back(args.cube_bounds[1]);
            }
        } else if (args.cube_bounds.size() == 6) {
            for (int k = 0; k < 3; ++k) {
                cube.lo.push_back(args.cube_bounds[static_cast<std::size_t>(2 * k)]);
                cube.hi.push_back(args.cube_bounds[static_cast<std::size_t>(2 * k + 1)]);
            }
        } else {
            throw CLI::ValidationError("--cube", "expected 2 or 6 values");
        }
        args.cfg.cube = cube;
    }

    const std::vector<acm::RunRecord> records = acm::run_bench(args.cfg);
    if (!args.out_path.empty()) {
        std::ofstream out(args.out_path);
        if (!out) throw std::runtime_error("cannot write " + args.out_path);
        acm::write_records_csv(out, records);
    }
    const acm::Summary summary = acm::summarize(records);
    if (!args.summary_path.empty()) {
        std::ofstream out(args.summary_path);
        if (!out) throw std::runtime_error("cannot write " + args.summary_path);
        out << acm::summary_to_json(summary).dump(2) << '\n';
    }

    std::cout << "sweep_value method trials mean_time_s mean_iterations mean_cardinality\n";
    for (const acm::SummaryRow& r : summary.rows)
        std::cout << r.sweep_value << ' ' << r.method << ' ' << r.trials << ' ' << r.mean_time_s
                  << ' ' << r.mean_iterations << ' ' << r.mean_cardinality << '\n';
    for (const acm::SpeedupRow& s : summary.speedups)
        std::cout << "speedup @" << s.sweep_value << ": time " << s.time_ratio << "x, iterations "
                  << s.iteration_ratio << "x\n";
    int errors = 0;
    for (const acm::RunRecord& r : records)
        if (!r.ok) ++errors;
    if (errors > 0) std::cout << errors << " job(s) failed; see records CSV\n";
}

void print_report(const std::string& label, const acm::SolveReport& rep) {
    std::cout << label << ": count " << rep.best_count << ", param (";
    for (std::size_t i = 0; i < rep.best_param.size(); ++i)
        std::cout << (i ? ", " : "") << rep.best_param[i];
    std::cout << "), iterations " << rep.iterations << ", time " << rep.wall_time << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Consensus maximization benchmarks: plain branch-and-bound vs the accelerated "
                 "variant that solves the final parameter by interval stabbing"};
    app.require_subcommand(1);

    CommonArgs resection, planar, corr, corrless;

    CLI::App* cmd_resection =
        app.add_subcommand("resection1d", "camera yaw from 3D-2D correspondences, sweep over "
                                          "outlier ratio");
    resection.cfg.problem = "resection1d";
    add_bench_flags(cmd_resection, resection, "0.1:0.9:0.1,0.91:0.95:0.01", 0.2);

    CLI::App* cmd_planar =
        app.add_subcommand("planar2d", "planar relative pose from 2D-2D correspondences, sweep "
                                       "over outlier ratio");
    planar.cfg.problem = "planar2d";
    add_bench_flags(cmd_planar, planar, "0.1:0.9:0.1,0.91:0.95:0.01", 0.02);

    CLI::App* cmd_corr = app.add_subcommand(
        "reg3d-corr", "3D registration translation from matched points, sweep over outlier ratio");
    corr.cfg.problem = "reg3d-corr";
    add_bench_flags(cmd_corr, corr, "0.1:0.9:0.1,0.91:0.95:0.01", 0.05);
    corr.cfg.scene.noise_sigma = 0.01;

    CLI::App* cmd_corrless = app.add_subcommand(
        "reg3d-corrless", "correspondence-less 3D registration, sweep over overlap fraction");
    corrless.cfg.problem = "reg3d-corrless";
    add_bench_flags(cmd_corrless, corrless, "0.2:1.0:0.2", 0.001);
    corrless.cfg.scene.n_points = 100;
    corrless.cfg.trials = 5;
    cmd_corrless->add_option("--tau-frac", corrless.cfg.tau_frac,
                             "pair length gate as a fraction of eps")
        ->capture_default_str();
    cmd_corrless->add_option("--keep", corrless.cfg.keep_pairs,
                             "longest point pairs kept per set")
        ->capture_default_str();
    cmd_corrless->add_option("--ply", corrless.cfg.ply_path,
                             "ASCII PLY cloud replacing the synthetic set");
    cmd_corrless->add_option("--voxel", corrless.cfg.voxel, "voxel size for downsampling the PLY")
        ->capture_default_str();
    cmd_corrless->add_flag("--union-bounds", corrless.cfg.corrless_union,
                           "join the two per-pair windows instead of intersecting them");

    // One-shot solver on correspondences or point sets from file.
    CLI::App* cmd_solve = app.add_subcommand("solve", "run one solver on data from file");
    std::string solve_problem, solve_in, solve_in2, solve_gt, solve_method = "acm";
    double solve_eps = 0.2, solve_tau_frac = 0.1, solve_pitch = 0.0, solve_roll = 0.0;
    double solve_voxel = 0.0;
    int solve_depth = 10;
    std::size_t solve_keep = 1000;
    bool solve_union = false;
    std::vector<double> solve_cube;
    cmd_solve->add_option("problem", solve_problem, "resection1d | planar2d | reg3d-corr | reg3d-corrless")
        ->required()
        ->check(CLI::IsMember({"resection1d", "planar2d", "reg3d-corr", "reg3d-corrless"}));
    cmd_solve->add_option("--in", solve_in, "input CSV (or PLY for corrless)")->required();
    cmd_solve->add_option("--in2", solve_in2, "second point set for corrless");
    cmd_solve->add_option("--gt", solve_gt, "planar ground-truth sidecar CSV");
    cmd_solve->add_option("--method", solve_method, "plain | acm")
        ->check(CLI::IsMember({"plain", "acm"}))
        ->capture_default_str();
    cmd_solve->add_option("--eps", solve_eps, "inlier residual threshold")->capture_default_str();
    cmd_solve->add_option("--tau-frac", solve_tau_frac, "corrless pair length gate fraction")
        ->capture_default_str();
    cmd_solve->add_option("--keep", solve_keep, "corrless longest pairs kept per set")
        ->capture_default_str();
    cmd_solve->add_option("--max-depth", solve_depth, "branch depth limit")->capture_default_str();
    cmd_solve->add_option("--pitch", solve_pitch, "resection known pitch (rad)")
        ->capture_default_str();
    cmd_solve->add_option("--roll", solve_roll, "resection known roll (rad)")
        ->capture_default_str();
    cmd_solve->add_option("--voxel", solve_voxel, "voxel size for PLY downsampling")
        ->capture_default_str();
    cmd_solve->add_option("--cube", solve_cube, "translation box, lo hi or lo1 hi1 ... lo3 hi3")
        ->expected(2, 6);
    cmd_solve->add_flag("--union-bounds", solve_union, "corrless union bounds");

    // Instance generator writing the CSV formats consumed by solve.
    CLI::App* cmd_gen = app.add_subcommand("gen", "write a synthetic instance to CSV");
    std::string gen_problem, gen_out = "instance";
    acm::SceneConfig gen_scene;
    double gen_overlap = 0.5;
    cmd_gen->add_option("problem", gen_problem, "resection1d | planar2d | reg3d-corr | reg3d-corrless")
        ->required()
        ->check(CLI::IsMember({"resection1d", "planar2d", "reg3d-corr", "reg3d-corrless"}));
    cmd_gen->add_option("--points", gen_scene.n_points, "points per instance")
        ->capture_default_str();
    cmd_gen->add_option("--outlier-ratio", gen_scene.outlier_ratio, "fraction of outliers")
        ->capture_default_str();
    cmd_gen->add_option("--overlap", gen_overlap, "corrless overlap fraction")
        ->capture_default_str();
    cmd_gen->add_option("--seed", gen_scene.seed, "seed")->capture_default_str();
    cmd_gen->add_option("--noise-px", gen_scene.noise_px, "image noise in pixels")
        ->capture_default_str();
    cmd_gen->add_option("--noise-sigma", gen_scene.noise_sigma, "3D point noise stddev")
        ->capture_default_str();
    cmd_gen->add_option("--out", gen_out, "output path prefix")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_resection->parsed()) finish_bench(resection);
        if (cmd_planar->parsed()) finish_bench(planar);
        if (cmd_corr->parsed()) finish_bench(corr);
        if (cmd_corrless->parsed()) finish_bench(corrless);

        if (cmd_solve->parsed()) {
            acm::SolveOptions opts;
            opts.max_depth = solve_depth;
            auto cube3 = [&](const std::vector<Eigen::Vector3d>& ps,
                             const std::vector<Eigen::Vector3d>& qs) {
                if (solve_cube.size() == 2)
                    return acm::Cube{{solve_cube[0], solve_cube[0], solve_cube[0]},
                                     {solve_cube[1], solve_cube[1], solve_cube[1]},
                                     0};
                if (solve_cube.size() == 6)
                    return acm::Cube{{solve_cube[0], solve_cube[2], solve_cube[4]},
                                     {solve_cube[1], solve_cube[3], solve_cube[5]},
                                     0};
                return acm::default_translation_cube(ps, qs, solve_eps);
            };
            auto shrink = [](acm::Cube c, std::size_t dims) {
                c.lo.resize(dims);
                c.hi.resize(dims);
                return c;
            };

            if (solve_problem == "resection1d") {
                const auto corrs = acm::read_resection_csv(solve_in);
                const auto tims = acm::build_tims(corrs, {solve_pitch, solve_roll});
                if (solve_method == "plain") {
                    print_report("plain", acm::solve_plain1d(tims, solve_eps, opts));
                } else {
                    const acm::Acm0Result r = acm::solve_acm0(tims, solve_eps);
                    std::cout << "acm: count " << r.count << ", yaw " << r.alpha << "\n";
                }
            } else if (solve_problem == "planar2d") {
                const auto cons = acm::build_planar_all(acm::read_planar_csv(solve_in));
                const acm::SolveReport rep = solve_method == "plain"
                                                 ? acm::solve_planar_plain(cons, solve_eps, opts)
                                                 : acm::solve_planar_acm1(cons, solve_eps, opts);
                print_report(solve_method, rep);
                if (rep.best_param.size() < 2) {
                    std::cout << "no satisfiable pose found\n";
                    return 0;
                }
                const double theta = rep.best_param[0] + rep.best_param[1];
                std::cout << "yaw " << theta << ", bearing " << rep.best_param[1] << "\n";
                if (!solve_gt.empty()) {
                    const auto [theta_gt, phi_gt] = acm::read_planar_gt_csv(solve_gt);
                    std::cout << "yaw error " << acm::angle_dist(theta, theta_gt) << " rad, "
                              << "bearing error "
                              << std::min(acm::angle_dist(rep.best_param[1], phi_gt),
                                          acm::angle_dist(rep.best_param[1], phi_gt + acm::kPi))
                              << " rad\n";
                }
            } else if (solve_problem == "reg3d-corr") {
                const auto corrs = acm::read_reg3d_csv(solve_in);
                std::vector<Eigen::Vector3d> ps, qs;
                for (const acm::Corr3D3D& c : corrs) {
                    ps.push_back(c.p);
                    qs.push_back(c.q);
                }
                const acm::Cube box = cube3(ps, qs);
                if (solve_method == "plain") {
                    acm::PlainCorrBounder b(corrs, solve_eps);
                    print_report("plain", acm::solve(b, box, opts));
                } else {
                    acm::AcmCorrBounder b(corrs, solve_eps);
                    print_report("acm", acm::solve(b, shrink(box, 2), opts));
                }
            } else {
                auto load_set = [&](const std::string& path) {
                    if (path.size() >= 4 && path.substr(path.size() - 4) == ".ply")
                        return acm::downsample_voxel(acm::load_ply(path), solve_voxel);
                    return acm::read_xyz_csv(path);
                };
                if (solve_in2.empty())
                    throw std::runtime_error("reg3d-corrless needs --in2 for the second set");
                const auto pset = load_set(solve_in);
                const auto qset = load_set(solve_in2);
                const auto pairs =
                    acm::build_ri_pairs(pset, qset, solve_tau_frac * solve_eps, solve_keep);
                std::cout << pairs.size() << " candidate pair matches\n";
                const acm::Cube box = cube3(pset, qset);
                if (solve_method == "plain") {
                    acm::PlainCorrlessBounder b(pairs, solve_eps);
                    print_report("plain", acm::solve(b, box, opts));
                } else {
                    acm::AcmCorrlessBounder b(pairs, solve_eps, solve_union);
                    print_report("acm", acm::solve(b, shrink(box, 2), opts));
                }
            }
        }

        if (cmd_gen->parsed()) {
            if (gen_problem == "resection1d") {
                const acm::ResectionInstance inst = acm::gen_resection(gen_scene);
                acm::write_resection_csv(gen_out + ".csv", inst.corrs);
                std::cout << "wrote " << gen_out << ".csv\n"
                          << "yaw " << inst.alpha_gt << ", pitch " << inst.prior.pitch << ", roll "
                          << inst.prior.roll << "\n";
            } else if (gen_problem == "planar2d") {
                const acm::PlanarInstance inst = acm::gen_planar(gen_scene);
                acm::write_planar_csv(gen_out + ".csv", inst.corrs);
                acm::write_planar_gt_csv(gen_out + "_gt.csv", inst.theta_gt, inst.phi_gt);
                std::cout << "wrote " << gen_out << ".csv and " << gen_out << "_gt.csv\n";
            } else if (gen_problem == "reg3d-corr") {
                const acm::Reg3dCorrInstance inst = acm::gen_reg3d_corr(gen_scene);
                acm::write_reg3d_csv(gen_out + ".csv", inst.corrs);
                std::cout << "wrote " << gen_out << ".csv\ntranslation " << inst.t_gt.transpose()
                          << "\n";
            } else {
                const acm::CorrlessInstance inst = acm::gen_reg3d_corrless(gen_scene, gen_overlap);
                acm::write_xyz_csv(gen_out + "_p.csv", inst.pset);
                acm::write_xyz_csv(gen_out + "_q.csv", inst.qset);
                std::cout << "wrote " << gen_out << "_p.csv and " << gen_out << "_q.csv\n"
                          << "translation " << inst.t_gt.transpose() << ", overlap "
                          << inst.overlap << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
