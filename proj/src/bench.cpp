#include "ccb/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ccb/baselines.hpp"
#include "ccb/bisection.hpp"
#include "ccb/knapsack.hpp"
#include "ccb/mgf_chain.hpp"
#include "ccb/svm.hpp"
#include "json.hpp"

namespace ccb {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Runs f(0..n-1) on a small pool; exceptions are rethrown on the caller.
template <class F>
void parallel_for(int n, int threads, F&& f) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

void maybe_write(const ExperimentConfig& cfg, const std::string& name, const std::string& csv) {
    if (cfg.out_dir.empty()) return;
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(std::filesystem::path(cfg.out_dir) / (name + ".csv"), std::ios::binary);
    out << csv;
}

KnapsackInstance gen_knap_instance(Rng rng, int n, double tau) {
    // knapPI-style uncorrelated data: integer profits/weights in [1,1000],
    // capacity half the total weight, then the adaptation sigma = 0.05 w,
    // b = 5 sigma.
    KnapsackInstance inst;
    inst.tau = tau;
    double total_w = 0.0;
    for (int k = 0; k < n; ++k) {
        const double p = 1.0 + static_cast<double>(rng.uniform_int(1000));
        const double w = 1.0 + static_cast<double>(rng.uniform_int(1000));
        inst.profits.push_back(p);
        inst.mean_weights.push_back(w);
        inst.sigmas.push_back(0.05 * w);
        inst.b_upper.push_back(0.25 * w);
        total_w += w;
    }
    inst.capacity = std::floor(0.5 * total_w);
    inst.validate();
    return inst;
}

SvmDataset gen_svm2d(Rng rng, int m, double tau, double c_svm, double gap = 3.0) {
    // Two Gaussian-ish clouds on the diagonal, `gap` apart center to center.
    SvmDataset d;
    d.c_svm = c_svm;
    for (int i = 0; i < m; ++i) {
        const int label = i % 2 == 0 ? 1 : -1;
        const double cx = label * gap / (2.0 * std::sqrt(2.0));
        // Box-Muller from the counter stream.
        const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double n1 = r * std::cos(2.0 * std::acos(-1.0) * u2);
        const double n2 = r * std::sin(2.0 * std::acos(-1.0) * u2);
        d.points.push_back({cx + 0.45 * n1, cx + 0.45 * n2});
        d.labels.push_back(label);
        d.sigmas.push_back({0.0, 0.0});
        d.bounds.push_back({1.0, 1.0});
        d.taus.push_back(tau);
    }
    d.calibrate_uncertainty();
    d.validate();
    return d;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("realizations")) cfg.realizations = doc["realizations"].get<int>();
    if (doc.contains("n")) cfg.n = doc["n"].get<int>();
    if (doc.contains("tau_grid")) cfg.tau_grid = doc["tau_grid"].get<std::vector<double>>();
    if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();
    if (doc.contains("experiment")) cfg.experiment = doc["experiment"].get<std::string>();
    if (doc.contains("eps_t")) cfg.eps_t = doc["eps_t"].get<double>();
    if (doc.contains("eps_alpha")) cfg.eps_alpha = doc["eps_alpha"].get<double>();
    if (doc.contains("instance_dir")) cfg.instance_dir = doc["instance_dir"].get<std::string>();
    if (doc.contains("table3_sizes")) cfg.table3_sizes = doc["table3_sizes"].get<std::vector<int>>();
    if (doc.contains("tau")) cfg.tau = doc["tau"].get<double>();
    if (doc.contains("mip_gap")) cfg.mip_gap = doc["mip_gap"].get<double>();
    if (doc.contains("time_limit")) cfg.time_limit = doc["time_limit"].get<double>();
    if (doc.contains("data_file")) cfg.data_file = doc["data_file"].get<std::string>();
    if (doc.contains("splits")) cfg.splits = doc["splits"].get<std::vector<double>>();
    if (doc.contains("svm_c")) cfg.svm_c = doc["svm_c"].get<double>();
    if (doc.contains("svm_tau")) cfg.svm_tau = doc["svm_tau"].get<double>();
    if (doc.contains("threads")) cfg.threads = doc["threads"].get<int>();
    return cfg;
}

Table1Draw gen_table1_spec(Rng& rng, int n) {
    if (n < 1) throw std::invalid_argument("gen_table1_spec: n must be >= 1");
    std::vector<RandomTermSpec> terms;
    terms.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        RandomTermSpec t;
        t.mean = rng.uniform();
        double a;
        do { a = -rng.uniform(); } while (a == 0.0);
        t.a_lower = a;
        do { t.b_upper = rng.uniform(); } while (t.b_upper == 0.0);
        do { t.sigma = rng.uniform(0.0, (t.b_upper - a) / 2.0); } while (t.sigma == 0.0);
        terms.push_back(t);
    }
    Table1Draw draw{SumSpec(std::move(terms)), 0.0};
    draw.alpha = rng.uniform(0.0, draw.spec.b_bar());
    return draw;
}

std::string run_fig2(const ExperimentConfig& cfg) {
    const std::vector<int> sizes = {10, 100};
    const int rows_total = cfg.realizations * static_cast<int>(sizes.size());
    std::vector<std::string> rows(static_cast<size_t>(std::max(rows_total, 0)));
    const Rng master(cfg.seed);
    parallel_for(rows_total, cfg.threads, [&](int idx) {
        const int n = sizes[static_cast<size_t>(idx / std::max(cfg.realizations, 1))];
        Rng rng = master.substream(static_cast<std::uint64_t>(idx));
        const Table1Draw draw = gen_table1_spec(rng, n);
        const double d = draw.alpha * n;
        const double star = phi_star(draw.spec, draw.alpha, cfg.eps_t).value;
        std::ostringstream os;
        os << n << ',' << idx << ',' << fmt(draw.alpha) << ',' << fmt(star) << ','
           << fmt(hoeffding_log_tail(draw.spec, d)) << ',' << fmt(bennett_log_tail(draw.spec, d))
           << ',' << fmt(cantelli_log_tail(draw.spec, d)) << ','
           << fmt(jebara_log_tail(draw.spec, d)) << '\n';
        rows[static_cast<size_t>(idx)] = os.str();
    });
    std::string csv = "n,index,alpha,phi_star,hoeffding,bennett,cantelli,jebara\n";
    for (const auto& r : rows) csv += r;
    maybe_write(cfg, "fig2", csv);
    return csv;
}

std::string run_fig3(const ExperimentConfig& cfg) {
    std::vector<std::string> rows(static_cast<size_t>(std::max(cfg.realizations, 0)));
    const Rng master(cfg.seed);
    parallel_for(cfg.realizations, cfg.threads, [&](int idx) {
        Rng rng = master.substream(static_cast<std::uint64_t>(idx));
        const Table1Draw draw = gen_table1_spec(rng, cfg.n);
        const double n = cfg.n;
        std::ostringstream os;
        for (double tau : cfg.tau_grid) {
            double refined;
            try {
                refined = confidence_bound(draw.spec, tau, cfg.eps_t, cfg.eps_alpha).alpha_hat * n;
            } catch (const InfeasibleLevelError& e) {
                refined = e.certified_bound() * n;  // only b_bar certifiable below tau^-
            }
            const double normal = normal_confidence(draw.spec, tau);
            os << fmt(tau) << ',' << idx << ',' << fmt(refined / normal) << ','
               << fmt(bennett_confidence(draw.spec, tau) / normal) << ','
               << fmt(hoeffding_confidence(draw.spec, tau) / normal) << ','
               << fmt(cantelli_confidence(draw.spec, tau) / normal) << '\n';
        }
        rows[static_cast<size_t>(idx)] = os.str();
    });
    std::string csv = "tau,index,refined_ratio,bennett_ratio,hoeffding_ratio,cantelli_ratio\n";
    for (const auto& r : rows) csv += r;
    maybe_write(cfg, "fig3", csv);
    return csv;
}

std::string run_mgf_chain(const ExperimentConfig& cfg) {
    std::vector<std::string> rows(static_cast<size_t>(std::max(cfg.realizations, 0)));
    const Rng master(cfg.seed);
    parallel_for(cfg.realizations, cfg.threads, [&](int idx) {
        Rng rng = master.substream(static_cast<std::uint64_t>(idx));
        const double t = rng.uniform(0.0, 5.0);
        const double p = rng.uniform(0.05, 0.95);
        double gamma;
        do { gamma = rng.uniform() * std::min(1.0, p / (1.0 - p)); } while (gamma == 0.0);
        const double b = rng.uniform(0.1, 2.0);
        std::ostringstream os;
        os << idx << ',' << fmt(t) << ',' << fmt(gamma) << ',' << fmt(b) << ',' << fmt(p);
        for (const auto& chk : check_chain(t, gamma, b, p)) os << ',' << fmt(chk.slack);
        os << '\n';
        rows[static_cast<size_t>(idx)] = os.str();
    });
    std::string csv = "index,t,gamma,b,p,D_le_J,D_le_cosh,cosh_le_gauss,Z_le_H,Cinf_le_Z,J_le_Cinf\n";
    for (const auto& r : rows) csv += r;
    maybe_write(cfg, "mgf_chain", csv);
    return csv;
}

std::string run_table3(const ExperimentConfig& cfg) {
    std::string csv = "instance,kp,ckp_n,ckp_refined,prob_pct,time_s,ckp_b,ckp_c,ckp_h\n";

    std::vector<std::pair<std::string, KnapsackInstance>> instances;
    if (!cfg.instance_dir.empty()) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(cfg.instance_dir))
            if (e.path().extension() == ".txt") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f);
            std::stringstream buf;
            buf << in.rdbuf();
            KnapsackInstance::AdaptOptions opt;
            opt.tau = cfg.tau;
            instances.emplace_back(f.stem().string(), KnapsackInstance::from_text(buf.str(), opt));
        }
    } else {
        const Rng master(cfg.seed);
        for (size_t i = 0; i < cfg.table3_sizes.size(); ++i) {
            const int n = cfg.table3_sizes[i];
            instances.emplace_back("gen_" + std::to_string(n),
                                   gen_knap_instance(master.substream(i), n, cfg.tau));
        }
    }

    CkpOptions opt;
    opt.mip_gap = cfg.mip_gap;
    opt.time_limit = cfg.time_limit;
    for (const auto& [name, inst] : instances) {
        const auto kp = solve_ckp(inst, CkpFormulation::KP, opt);
        const auto n = solve_ckp(inst, CkpFormulation::N, opt);
        const auto refined = solve_ckp(inst, CkpFormulation::Refined, opt);
        const auto bb = solve_ckp(inst, CkpFormulation::B, opt);
        const auto c = solve_ckp(inst, CkpFormulation::C, opt);
        const auto h = solve_ckp(inst, CkpFormulation::H, opt);
        const double prob = 100.0 * std::exp(refined_log_prob(inst, refined.y));
        csv += name + ',' + fmt(kp.objective) + ',' + fmt(n.objective) + ',' +
               fmt(refined.objective) + ',' + fmt(prob) + ',' + fmt(refined.wall_time) + ',' +
               fmt(bb.objective) + ',' + fmt(c.objective) + ',' + fmt(h.objective) + '\n';
    }
    maybe_write(cfg, "table3", csv);
    return csv;
}

std::string run_svm(const ExperimentConfig& cfg) {
    const bool wisconsin = cfg.experiment == "svm-wisconsin";
    SvmDataset base;
    if (wisconsin) {
        if (cfg.data_file.empty())
            throw std::invalid_argument("svm-wisconsin needs a data_file (no downloads)");
        base = load_svm_csv(cfg.data_file, cfg.svm_tau, cfg.svm_c);
    } else {
        base = gen_svm2d(Rng(cfg.seed).substream(0xD5), 100, cfg.svm_tau, cfg.svm_c);
    }
    const int m = base.num_points();

    struct Task {
        double split;
        int realization;
    };
    std::vector<Task> tasks;
    for (double s : cfg.splits)
        for (int r = 0; r < cfg.realizations; ++r) tasks.push_back({s, r});

    std::vector<std::string> rows(tasks.size());
    const Rng master(cfg.seed);
    parallel_for(static_cast<int>(tasks.size()), cfg.threads, [&](int ti) {
        const auto [split, realization] = tasks[static_cast<size_t>(ti)];
        Rng rng = master.substream(static_cast<std::uint64_t>(ti) + 1000);
        std::vector<int> order(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) order[static_cast<size_t>(i)] = i;
        for (int i = m - 1; i > 0; --i)
            std::swap(order[static_cast<size_t>(i)],
                      order[static_cast<size_t>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1))]);
        const int train_count = std::max(2, static_cast<int>(std::lround(split * m)));
        std::vector<int> train_idx(order.begin(), order.begin() + train_count);
        std::vector<int> test_idx(order.begin() + train_count, order.end());
        SvmDataset train = base.subset(train_idx);
        train.calibrate_uncertainty();  // per-class std of the training points
        for (auto& t : train.taus) t = cfg.svm_tau;
        SvmDataset test = base.subset(test_idx);

        std::ostringstream os;
        for (SvmMethod method :
             {SvmMethod::Refined, SvmMethod::Cantelli, SvmMethod::Deterministic}) {
            const SvmSolution sol = solve_svm(train, method);
            const double score = test.num_points() > 0 ? svm_score(sol, test) : 1.0;
            os << fmt(split) << ',' << realization << ',' << to_string(method) << ','
               << fmt(score) << ',' << fmt(sol.objective) << ',' << fmt(sol.wall_time) << '\n';
        }
        rows[static_cast<size_t>(ti)] = os.str();
    });
    std::string csv = "split,realization,method,score,objective,seconds\n";
    for (const auto& r : rows) csv += r;
    maybe_write(cfg, wisconsin ? "svm_wisconsin" : "svm2d", csv);
    return csv;
}

std::string run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "fig2") return run_fig2(cfg);
    if (cfg.experiment == "fig3") return run_fig3(cfg);
    if (cfg.experiment == "table3") return run_table3(cfg);
    if (cfg.experiment == "svm2d" || cfg.experiment == "svm-wisconsin") return run_svm(cfg);
    if (cfg.experiment == "mgf-chain") return run_mgf_chain(cfg);
    throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

}  // namespace ccb
