// ccb: confidence bounds and chance-constrained solvers on second-order
// moment data.  Subcommands: bound, confidence, knapsack, svm, mgf-chain,
// bench.  Exit codes: 0 success, 2 infeasible level, 1 usage error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ccb/baselines.hpp"
#include "ccb/bench.hpp"
#include "ccb/bisection.hpp"
#include "ccb/knapsack.hpp"
#include "ccb/mgf_chain.hpp"
#include "ccb/svm.hpp"
#include "json.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double timed(const std::function<double()>& f, double& seconds) {
    const auto t0 = std::chrono::steady_clock::now();
    const double v = f();
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return v;
}

int cmd_bound(const std::string& spec_path, double alpha, double tau, double eps_t) {
    const ccb::SumSpec spec = ccb::SumSpec::from_json(slurp(spec_path));
    const double d = alpha * spec.n();
    const bool with_conf = tau > 0.0;

    std::cout << "method,log_bound,confidence,seconds\n";
    const auto emit = [&](ccb::BoundMethod m, const std::function<double()>& log_tail,
                          const std::function<double()>& conf) {
        ccb::BoundReport rep;
        rep.method = m;
        double secs = 0.0;
        rep.log_prob_bound = timed(log_tail, secs);
        rep.wall_time = secs;
        if (with_conf && conf) {
            double cs = 0.0;
            rep.confidence_bound = timed(conf, cs);
            rep.wall_time += cs;
        }
        std::cout << rep.csv_row() << '\n';
    };

    emit(ccb::BoundMethod::RefinedBennett,
         [&] { return ccb::phi_star(spec, alpha, eps_t).value; },
         [&] { return ccb::confidence_bound(spec, tau, eps_t).alpha_hat * spec.n(); });
    emit(ccb::BoundMethod::Hoeffding, [&] { return ccb::hoeffding_log_tail(spec, d); },
         [&] { return ccb::hoeffding_confidence(spec, tau); });
    emit(ccb::BoundMethod::Bennett, [&] { return ccb::bennett_log_tail(spec, d); },
         [&] { return ccb::bennett_confidence(spec, tau); });
    emit(ccb::BoundMethod::Cantelli, [&] { return ccb::cantelli_log_tail(spec, d); },
         [&] { return ccb::cantelli_confidence(spec, tau); });
    emit(ccb::BoundMethod::Bernstein, [&] { return ccb::bernstein_log_tail(spec, d); }, nullptr);
    emit(ccb::BoundMethod::Jebara, [&] { return ccb::jebara_log_tail(spec, d); }, nullptr);
    if (with_conf)
        emit(ccb::BoundMethod::Normal, [&] { return 0.0; },
             [&] { return ccb::normal_confidence(spec, tau); });
    return 0;
}

int cmd_confidence(const std::string& spec_path, double tau, double eps_t, double eps_alpha) {
    const ccb::SumSpec spec = ccb::SumSpec::from_json(slurp(spec_path));
    const ccb::ConfidenceResult res = ccb::confidence_bound(spec, tau, eps_t, eps_alpha);
    nlohmann::json doc = {
        {"alpha_hat", res.alpha_hat},
        {"bound_on_sum", res.alpha_hat * spec.n()},
        {"outer_iterations", res.outer_iterations},
        {"total_inner_iterations", res.total_inner_iterations},
        {"max_inner_iterations", res.max_inner_iterations},
        {"terminated_by", res.terminated_by == ccb::ConfidenceTermination::tolerance_phi
                              ? "tolerance_phi"
                              : "interval_alpha"},
        {"eps_t", res.eps_t},
        {"eps_alpha", res.eps_alpha},
    };
    std::cout << res.alpha_hat * spec.n() << '\n' << doc.dump(2) << '\n';
    return 0;
}

ccb::KnapsackInstance load_instance(const std::string& path, double tau) {
    const std::string text = slurp(path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        auto inst = ccb::KnapsackInstance::from_json(text);
        if (tau > 0.0) inst.tau = tau;
        return inst;
    }
    ccb::KnapsackInstance::AdaptOptions opt;
    if (tau > 0.0) opt.tau = tau;
    return ccb::KnapsackInstance::from_text(text, opt);
}

int cmd_knapsack(const std::string& instance_path, const std::string& formulation, double tau,
                 double mip_gap, double time_limit) {
    const ccb::KnapsackInstance inst = load_instance(instance_path, tau);
    ccb::CkpOptions opt;
    opt.mip_gap = mip_gap;
    opt.time_limit = time_limit;

    std::cout << "formulation,objective,certificate,prob_pct,cuts,nodes,seconds\n";
    const auto emit = [&](ccb::CkpFormulation f) {
        const ccb::KnapsackSolution sol = ccb::solve_ckp(inst, f, opt);
        const double prob =
            sol.y.empty() ? 0.0 : 100.0 * std::exp(ccb::refined_log_prob(inst, sol.y));
        std::cout << ccb::to_string(f) << ',' << sol.objective << ',' << sol.certificate << ','
                  << prob << ',' << sol.cuts_added << ',' << sol.nodes << ',' << sol.wall_time
                  << '\n';
    };
    if (formulation == "all") {
        for (auto f : {ccb::CkpFormulation::KP, ccb::CkpFormulation::N, ccb::CkpFormulation::Refined,
                       ccb::CkpFormulation::B, ccb::CkpFormulation::C, ccb::CkpFormulation::H})
            emit(f);
    } else {
        emit(ccb::ckp_formulation_from_string(formulation));
    }
    return 0;
}

int cmd_svm(const std::string& data_path, const std::string& method, double tau, double c_svm,
            double split, std::uint64_t seed) {
    ccb::ExperimentConfig cfg;
    cfg.experiment = data_path.empty() ? "svm2d" : "svm-wisconsin";
    cfg.data_file = data_path;
    cfg.svm_tau = tau;
    cfg.svm_c = c_svm;
    cfg.splits = {split};
    cfg.realizations = 1;
    cfg.seed = seed;
    const std::string csv = ccb::run_svm(cfg);
    if (method == "all") {
        std::cout << csv;
        return 0;
    }
    // Filter to one method's rows.
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    std::cout << line << '\n';
    while (std::getline(is, line))
        if (line.find("," + method + ",") != std::string::npos) std::cout << line << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"confidence bounds and chance-constrained solvers"};
    app.require_subcommand(1);

    std::string spec_path, instance_path, data_path, config_path, out_dir, experiment;
    std::string formulation = "all", method = "all";
    double alpha = 0.0, tau = 0.0, eps_t = 1e-6, eps_alpha = 1e-6;
    double mip_gap = 1e-5, time_limit = 1e30, c_svm = 100.0, split = 0.8;
    std::uint64_t seed = 1;
    int realizations = -1, n = -1, samples = 10000;

    auto* bound = app.add_subcommand("bound", "tail bounds at a deviation level");
    bound->add_option("--spec", spec_path)->required();
    bound->add_option("--alpha", alpha)->required();
    bound->add_option("--tau", tau);
    bound->add_option("--eps-t", eps_t);

    auto* conf = app.add_subcommand("confidence", "refined confidence bound");
    conf->add_option("--spec", spec_path)->required();
    conf->add_option("--tau", tau)->required();
    conf->add_option("--eps-t", eps_t);
    conf->add_option("--eps-alpha", eps_alpha);

    auto* knap = app.add_subcommand("knapsack", "chance-constrained knapsack");
    knap->add_option("--instance", instance_path)->required();
    knap->add_option("--formulation", formulation);
    knap->add_option("--tau", tau);
    knap->add_option("--mip-gap", mip_gap);
    knap->add_option("--time-limit", time_limit);

    auto* svm = app.add_subcommand("svm", "distributionally robust svm");
    svm->add_option("--data", data_path);
    svm->add_option("--method", method);
    svm->add_option("--tau", tau)->default_val(0.02);
    svm->add_option("--C", c_svm);
    svm->add_option("--split", split);
    svm->add_option("--seed", seed);

    auto* mgf = app.add_subcommand("mgf-chain", "MGF estimator dominance samples");
    mgf->add_option("--samples", samples);
    mgf->add_option("--seed", seed);

    auto* bench = app.add_subcommand("bench", "experiment drivers");
    bench->add_option("--experiment", experiment);
    bench->add_option("--seed", seed);
    bench->add_option("--realizations", realizations);
    bench->add_option("--n", n);
    bench->add_option("--out", out_dir);
    bench->add_option("--config", config_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1
    }

    try {
        if (bound->parsed()) return cmd_bound(spec_path, alpha, tau, eps_t);
        if (conf->parsed()) return cmd_confidence(spec_path, tau, eps_t, eps_alpha);
        if (knap->parsed())
            return cmd_knapsack(instance_path, formulation, tau, mip_gap, time_limit);
        if (svm->parsed()) return cmd_svm(data_path, method, tau, c_svm, split, seed);
        if (mgf->parsed()) {
            ccb::ExperimentConfig cfg;
            cfg.experiment = "mgf-chain";
            cfg.seed = seed;
            cfg.realizations = samples;
            std::cout << ccb::run_mgf_chain(cfg);
            return 0;
        }
        if (bench->parsed()) {
            ccb::ExperimentConfig cfg;
            if (!config_path.empty()) cfg = ccb::ExperimentConfig::from_json(slurp(config_path));
            if (!experiment.empty()) cfg.experiment = experiment;
            if (bench->count("--seed")) cfg.seed = seed;
            if (realizations >= 0) cfg.realizations = realizations;
            if (n > 0) cfg.n = n;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            std::cout << ccb::run_experiment(cfg);
            return 0;
        }
    } catch (const ccb::InfeasibleLevelError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
