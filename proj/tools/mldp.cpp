// mldp: command-line front end for the mldp library.
//
// Exit codes: 0 success, 1 input error, 2 verification FAIL or UNVERIFIED
// (the report is still written). Errors are reported as JSON on stderr.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mldp/io.hpp"
#include "mldp/mldp.hpp"

namespace {

using mldp::io::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitVerification = 2;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw mldp::io::input_error("cannot write " + out_path);
    out << text;
    if (!out) throw mldp::io::input_error("write failed for " + out_path);
}

void report_error(const std::string& kind, const std::string& message, json extra = json::object()) {
    json j;
    j["error"] = kind;
    j["message"] = message;
    for (auto& [k, v] : extra.items()) j[k] = v;
    std::cerr << mldp::io::to_text(j) << std::flush;
}

void warn(const std::string& message) {
    json j;
    j["warning"] = message;
    std::cerr << mldp::io::to_text(j) << std::flush;
}

int verdict_exit(mldp::Verdict v) { return v == mldp::Verdict::pass ? kExitOk : kExitVerification; }

mldp::Verdict combine(mldp::Verdict a, mldp::Verdict b) {
    using mldp::Verdict;
    if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
    if (a == Verdict::unverified || b == Verdict::unverified) return Verdict::unverified;
    return Verdict::pass;
}

std::string csv_real(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    return mldp::format_real(v);
}

struct Global {
    std::uint64_t budget = mldp::kDefaultEnumerationBudget;
    unsigned threads = 0;

    mldp::EnumerationOptions enumeration() const { return {budget, threads}; }
};

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string model;
    std::size_t l = 0;
    std::uint64_t seed = 0;
    std::size_t count = 1;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    const auto model = mldp::io::load_model(a.model);
    std::string text;
    for (std::size_t i = 0; i < a.count; ++i) {
        text += mldp::io::path_line(mldp::sample_path(model, a.l, a.seed + i));
        text += '\n';
    }
    emit(text, a.out);
    return kExitOk;
}

struct EstimateArgs {
    std::string paths;
    std::size_t s = 1;
    std::optional<std::size_t> n;
    std::string out;
};

int run_estimate(const EstimateArgs& a) {
    const auto paths = mldp::io::load_paths(a.paths, a.n);
    json all = json::array();
    for (const auto& x : paths) {
        if (a.s >= x.length()) warn("s >= l: the cyclic window wraps around the path more than once");
        const auto nu = mldp::cyclic_empirical(x, a.s);
        json j;
        j["l"] = x.length();
        j["s"] = a.s;
        j["counts"] = std::vector<mldp::Count>(nu.counts().begin(), nu.counts().end());
        all.push_back(std::move(j));
    }
    emit(mldp::io::to_text(all.size() == 1 ? all[0] : all), a.out);
    return kExitOk;
}

struct EntropyArgs {
    std::string model;
    std::string paths;
    std::string out;
};

int run_entropy(const EntropyArgs& a) {
    const auto model = mldp::io::load_model(a.model);
    json j;
    j["n"] = model.n();
    j["s"] = model.s();
    j["process_entropy"] = mldp::process_entropy(model);
    j["entropy_mu"] = mldp::entropy(model.mu());
    j["entropy_mu_bar"] = mldp::entropy(model.mu_bar());
    if (!a.paths.empty()) {
        json smb = json::array();
        for (const auto& x : mldp::io::load_paths(a.paths, model.n())) smb.push_back(mldp::smb_statistic(model, x));
        j["smb"] = std::move(smb);
    }
    emit(mldp::io::to_text(j), a.out);
    return kExitOk;
}

struct RateArgs {
    std::string model;
    std::string nu;
    std::string kind = "ktuple";
    std::string out;
};

int run_rate(const RateArgs& a) {
    const auto model = mldp::io::load_model(a.model);
    const auto values = mldp::io::parse_real_list(a.nu);
    mldp::KTupleDistribution nu = [&] {
        try {
            return mldp::KTupleDistribution(model.n(), model.s() + 1, values);
        } catch (const mldp::domain_error& e) {
            throw mldp::io::input_error(std::string("--nu: ") + e.what());
        }
    }();
    json j;
    j["kind"] = a.kind;
    if (a.kind == "theta") {
        j["stationary"] = mldp::check_stationary(nu).is_stationary;
        j["rate"] = mldp::rate_theta(nu, model.mu());
    } else {
        const auto flag = mldp::check_stationary(nu);
        if (!flag.is_stationary) throw mldp::validation_error("--nu is not stationary", flag.max_violation);
        j["rate"] = mldp::rate_ktuple(nu, model.mu());
    }
    emit(mldp::io::to_text(j), a.out);
    return kExitOk;
}

struct CensusArgs {
    std::size_t n = 0;
    std::size_t l = 0;
    std::size_t s = 1;
    std::string out;
};

int run_types_census(const CensusArgs& a, const Global& g) {
    const auto census = mldp::enumerate_census(a.l, a.n, a.s, g.enumeration());
    emit(mldp::io::to_text(mldp::io::census_to_json(census)), a.out);
    return kExitOk;
}

json bounds_json(const mldp::BoundsReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json j;
        j["counts"] = row.counts;
        j["cardinality"] = row.cardinality;
        j["conditional_entropy"] = row.conditional_entropy;
        j["log_lower"] = row.log_lower;
        j["log_cardinality"] = row.log_cardinality;
        j["log_upper"] = row.log_upper;
        j["sandwich_ok"] = row.sandwich_ok;
        j["permutation_ok"] = row.permutation_ok;
        j["achievable"] = row.achievable;
        rows.push_back(std::move(j));
    }
    json j;
    j["n"] = r.n;
    j["l"] = r.l;
    j["s"] = r.s;
    j["classes"] = r.rows.size();
    j["failures"] = r.failures();
    j["hypothesis_l_ge_n"] = r.hypothesis_met;
    j["verdict"] = std::string(mldp::to_string(r.verdict()));
    j["rows"] = std::move(rows);
    return j;
}

void summary(mldp::Verdict v, const std::string& detail) {
    std::cerr << mldp::to_string(v) << ": " << detail << '\n' << std::flush;
}

struct VerifyCensusArgs {
    std::string census;
    std::optional<std::size_t> n;
    std::optional<std::size_t> s;
    std::string out;
};

int run_types_verify(const VerifyCensusArgs& a) {
    const auto census = mldp::io::load_census(a.census, a.n, a.s);
    const auto report = mldp::census_bounds_check(census);
    emit(mldp::io::to_text(bounds_json(report)), a.out);
    std::ostringstream d;
    d << report.rows.size() << " classes, " << report.failures() << " failures (n=" << report.n << ", l=" << report.l
      << ", s=" << report.s << ")";
    if (!report.hypothesis_met) d << "; l < n so the cardinality bounds are not guaranteed";
    summary(report.verdict(), d.str());
    return verdict_exit(report.verdict());
}

struct VerifyBoundsArgs {
    std::size_t n = 0;
    std::size_t l = 0;
    std::size_t s = 1;
    std::string model;
    std::string out;
};

int run_verify_bounds(const VerifyBoundsArgs& a, const Global& g) {
    std::optional<mldp::MarkovModel> model;
    if (!a.model.empty()) {
        model = mldp::io::load_model(a.model);
        if (model->n() != a.n || model->s() != a.s)
            throw mldp::io::input_error("model shape (n=" + std::to_string(model->n()) + ", s=" + std::to_string(model->s()) +
                                        ") does not match --n/--s");
    }
    const auto census = model ? mldp::enumerate_weighted_census(*model, a.l, g.enumeration())
                              : mldp::enumerate_census(a.l, a.n, a.s, g.enumeration());
    const auto bounds = mldp::census_bounds_check(census);
    auto verdict = bounds.verdict();
    std::ostringstream d;
    d << census.size() << " classes, " << bounds.failures() << " bound failures";

    json j = bounds_json(bounds);
    const bool paths_ok = census.total_paths() == mldp::ipow(a.n, a.l);
    j["total_paths"] = census.total_paths();
    j["total_paths_ok"] = paths_ok;
    if (!paths_ok) verdict = mldp::Verdict::fail;

    if (model) {
        mldp::NeumaierSum mass;
        for (const auto& e : census.entries()) mass.add(e.probability.value());
        const bool mass_ok = std::abs(mass.value() - 1.0) <= 1e-9;
        j["probability_mass"] = mass.value();
        j["probability_mass_ok"] = mass_ok;
        if (!mass_ok) verdict = mldp::Verdict::fail;

        if (model->strictly_positive() && a.l >= a.s + 1) {
            const auto rates = mldp::rate_report(*model, census);
            json rows = json::array();
            std::size_t rate_failures = 0;
            for (const auto& r : rates) {
                json row;
                row["counts"] = r.counts;
                row["delta"] = r.delta;
                row["rate"] = r.rate;
                row["envelope"] = r.error_bound;
                row["ok"] = r.pass;
                if (!r.pass) ++rate_failures;
                rows.push_back(std::move(row));
            }
            j["rate_failures"] = rate_failures;
            j["rates"] = std::move(rows);
            if (rate_failures != 0) verdict = mldp::Verdict::fail;
            d << ", " << rate_failures << " rate-envelope failures";
        } else {
            verdict = combine(verdict, mldp::Verdict::unverified);
            d << "; model has zero entries so the rate envelope is not checked";
        }
    }
    if (!bounds.hypothesis_met) d << "; l < n so the cardinality bounds are not guaranteed";
    j["verdict"] = std::string(mldp::to_string(verdict));
    emit(mldp::io::to_text(j), a.out);
    summary(verdict, d.str());
    return verdict_exit(verdict);
}

struct VerifyLdpArgs {
    std::string model;
    std::string event;
    std::size_t lmin = 0;
    std::size_t lmax = 0;
    std::string out;
};

int run_verify_ldp(const VerifyLdpArgs& a, const Global& g) {
    const auto model = mldp::io::load_model(a.model);
    const auto event = mldp::io::load_event(a.event);
    if (a.lmin == 0 || a.lmin > a.lmax) throw mldp::io::input_error("need 1 <= --lmin <= --lmax");
    if (a.lmin < model.s() + 1) throw mldp::io::input_error("--lmin must be at least s + 1");
    std::vector<std::size_t> schedule;
    for (std::size_t l = a.lmin; l <= a.lmax; ++l) schedule.push_back(l);
    const auto rows = mldp::ldp_event_check(model, event, schedule, g.enumeration());

    std::string csv = "l,exact,rate_proxy,envelope,pass\n";
    bool all_pass = true;
    for (const auto& r : rows) {
        csv += std::to_string(r.l) + ',' + csv_real(r.exact) + ',' + csv_real(r.rate_proxy) + ',' + csv_real(r.envelope) +
               ',' + (r.pass ? "true" : "false") + '\n';
        all_pass = all_pass && r.pass;
    }
    emit(csv, a.out);
    const auto verdict = all_pass ? mldp::Verdict::pass : mldp::Verdict::fail;
    summary(verdict, std::to_string(rows.size()) + " lengths checked");
    return verdict_exit(verdict);
}

struct ContractArgs {
    std::string model;
    std::string phi;
    std::string out;
};

int run_contract(const ContractArgs& a) {
    const auto model = mldp::io::load_model(a.model);
    const auto values = mldp::io::parse_real_list(a.phi);
    mldp::KTupleDistribution phi = [&] {
        try {
            return mldp::KTupleDistribution(model.n(), 1, values);
        } catch (const mldp::domain_error& e) {
            throw mldp::io::input_error(std::string("--phi: ") + e.what());
        }
    }();
    const auto var = mldp::singleton_rate_variational(phi, model);
    const auto con = mldp::singleton_rate_constrained(phi, model);
    const auto row = mldp::donsker_varadhan_row_form(phi, model);

    json j;
    j["value_variational"] = var.value;
    j["value_constrained"] = con.value;
    j["value_row_form"] = row.value;
    j["u_star"] = mldp::io::real_array(var.u_star);
    j["nu_star"] = mldp::io::real_array(var.nu_star.values());
    j["nu_constrained"] = mldp::io::real_array(con.argmin.values());
    json res;
    res["variational"] = var.residual;
    res["row_form"] = row.residual;
    res["constrained_marginal"] = con.marginal_violation;
    j["residuals"] = std::move(res);
    j["iterations"] = {{"variational", var.iterations}, {"row_form", row.iterations}, {"constrained", con.iterations}};
    emit(mldp::io::to_text(j), a.out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Method-of-types large-deviation toolkit for finite-state Markov chains"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "mldp 1.0.0");

    Global g;
    app.add_option("--budget", g.budget, "Maximum enumeration path-steps n^l * l")
        ->envname("LDP_BUDGET")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--threads", g.threads, "Enumeration worker threads (0 = hardware concurrency); output does not depend on it")
        ->capture_default_str();

    int code = kExitOk;
    std::function<int()> action;

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Sample paths from a model; one path per line");
    simulate->add_option("--model", sim.model, "Model JSON file")->required();
    simulate->add_option("--l", sim.l, "Path length")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "RNG seed; path i of --count uses seed + i")->required();
    simulate->add_option("--count", sim.count, "Number of paths")->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--out", sim.out, "Output file (default stdout)");
    simulate->callback([&] { action = [&] { return run_simulate(sim); }; });

    EstimateArgs est;
    std::size_t est_n = 0;
    auto* estimate = app.add_subcommand("estimate", "Cyclic empirical (s+1)-tuple counts of each path in a path file");
    estimate->add_option("--paths", est.paths, "Path file")->required();
    estimate->add_option("--s", est.s, "Memory s")->capture_default_str()->check(CLI::PositiveNumber);
    auto* est_n_opt = estimate->add_option("--n", est_n, "Alphabet size (default: largest symbol + 1)")->check(CLI::PositiveNumber);
    estimate->add_option("--out", est.out, "Output file (default stdout)");
    estimate->callback([&] {
        if (est_n_opt->count() != 0) est.n = est_n;
        action = [&] { return run_estimate(est); };
    });

    EntropyArgs ent;
    auto* entropy = app.add_subcommand("entropy", "Process entropy of a model; with --paths also the per-path statistic -(1/l) log Pr");
    entropy->add_option("--model", ent.model, "Model JSON file")->required();
    entropy->add_option("--paths", ent.paths, "Path file");
    entropy->add_option("--out", ent.out, "Output file (default stdout)");
    entropy->callback([&] { action = [&] { return run_entropy(ent); }; });

    RateArgs rate;
    auto* rate_cmd = app.add_subcommand("rate", "Rate function value of a tuple distribution under a model");
    rate_cmd->add_option("--model", rate.model, "Model JSON file")->required();
    rate_cmd->add_option("--nu", rate.nu, "n^(s+1) probabilities, comma separated, lexicographic order")->required();
    rate_cmd->add_option("--kind", rate.kind, "ktuple: stationary nu required; theta: +inf when not stationary")
        ->capture_default_str()
        ->check(CLI::IsMember({"ktuple", "theta"}));
    rate_cmd->add_option("--out", rate.out, "Output file (default stdout)");
    rate_cmd->callback([&] { action = [&] { return run_rate(rate); }; });

    auto* types = app.add_subcommand("types", "Type-class census and cardinality bounds");
    types->require_subcommand(1);
    CensusArgs cen;
    auto* census = types->add_subcommand("census", "Enumerate all n^l paths and write the census JSON");
    census->add_option("--n", cen.n, "Alphabet size")->required()->check(CLI::PositiveNumber);
    census->add_option("--l", cen.l, "Path length")->required()->check(CLI::PositiveNumber);
    census->add_option("--s", cen.s, "Memory s")->capture_default_str()->check(CLI::PositiveNumber);
    census->add_option("--out", cen.out, "Output file (default stdout)");
    census->callback([&] { action = [&] { return run_types_census(cen, g); }; });

    VerifyCensusArgs vc;
    std::size_t vc_n = 0, vc_s = 0;
    auto* tverify = types->add_subcommand(
        "verify", "Check the cardinality bounds for every class of a census file; JSON report to --out or stdout, "
                  "PASS/FAIL/UNVERIFIED summary line on stderr");
    tverify->add_option("--census", vc.census, "Census JSON file")->required();
    auto* vc_n_opt = tverify->add_option("--n", vc_n, "Alphabet size (or give --s; default s = 1)")->check(CLI::PositiveNumber);
    auto* vc_s_opt = tverify->add_option("--s", vc_s, "Memory s")->check(CLI::PositiveNumber);
    tverify->add_option("--out", vc.out, "Output file (default stdout)");
    tverify->callback([&] {
        if (vc_n_opt->count() != 0) vc.n = vc_n;
        if (vc_s_opt->count() != 0) vc.s = vc_s;
        action = [&] { return run_types_verify(vc); };
    });

    auto* verify = app.add_subcommand("verify", "Exhaustive verification runs");
    verify->require_subcommand(1);
    VerifyBoundsArgs vb;
    auto* vbounds = verify->add_subcommand(
        "bounds", "Census plus cardinality bounds; with --model also total probability and the rate envelope of every "
                  "class. JSON report to --out or stdout, summary line on stderr");
    vbounds->add_option("--n", vb.n, "Alphabet size")->required()->check(CLI::PositiveNumber);
    vbounds->add_option("--l", vb.l, "Path length")->required()->check(CLI::PositiveNumber);
    vbounds->add_option("--s", vb.s, "Memory s")->capture_default_str()->check(CLI::PositiveNumber);
    vbounds->add_option("--model", vb.model, "Model JSON file");
    vbounds->add_option("--out", vb.out, "Output file (default stdout)");
    vbounds->callback([&] { action = [&] { return run_verify_bounds(vb, g); }; });

    VerifyLdpArgs vl;
    auto* vldp = verify->add_subcommand("ldp", "Exact event probabilities against the rate function over a range of lengths");
    vldp->add_option("--model", vl.model, "Model JSON file (strictly positive)")->required();
    vldp->add_option("--event", vl.event, "Event JSON file (ball, halfspace or classes)")->required();
    vldp->add_option("--lmin", vl.lmin, "Smallest length")->required();
    vldp->add_option("--lmax", vl.lmax, "Largest length")->required();
    vldp->add_option("--out", vl.out, "CSV output file (default stdout)");
    vldp->footer(
        "CSV columns:\n"
        "  l           path length\n"
        "  exact       (1/l) log Pr{empirical measure in the event}, exact by enumeration\n"
        "  rate_proxy  -min D_c(zeta || mu) over achievable zeta in the event\n"
        "  envelope    (n^(s+1) log(2l) + max(|c_lo|,|c_hi|) + log l) / l\n"
        "  pass        true when |exact - rate_proxy| <= envelope + n^(s+1) log(l+1) / l\n"
        "An event containing no achievable class gives exact = rate_proxy = -inf and pass = true.");
    vldp->callback([&] { action = [&] { return run_verify_ldp(vl, g); }; });

    ContractArgs con;
    auto* contract = app.add_subcommand("contract", "Rate function of singleton frequencies of a one-step chain, three ways");
    contract->add_option("--model", con.model, "Model JSON file (s = 1, strictly positive)")->required();
    contract->add_option("--phi", con.phi, "Singleton frequencies, comma separated")->required();
    contract->add_option("--out", con.out, "Output file (default stdout)");
    contract->callback([&] { action = [&] { return run_contract(con); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage_error", e.what());
        return kExitInput;
    }

    try {
        code = action ? action() : kExitInput;
    } catch (const mldp::validation_error& e) {
        report_error("validation_error", e.what(), {{"max_violation", e.max_violation()}});
        code = kExitInput;
    } catch (const mldp::budget_exceeded& e) {
        report_error("budget_exceeded", e.what(), {{"required", e.required()}, {"budget", e.budget()}});
        code = kExitInput;
    } catch (const mldp::hypothesis_error& e) {
        report_error("hypothesis_error", e.what(), {{"verdict", "UNVERIFIED"}});
        code = kExitVerification;
    } catch (const mldp::convergence_error& e) {
        report_error("convergence_error", e.what(), {{"residual", e.residual()}});
        code = kExitInput;
    } catch (const mldp::io::input_error& e) {
        report_error("input_error", e.what());
        code = kExitInput;
    } catch (const mldp::domain_error& e) {
        report_error("domain_error", e.what());
        code = kExitInput;
    } catch (const std::exception& e) {
        report_error("internal_error", e.what());
        code = kExitInput;
    }
    return code;
}
