// Command-line front end: build and inspect sampling plans, draw exact
// samples, validate output distributions, run augmentation benchmarks, and
// print efficiency bounds.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dice/enterprise.hpp"
#include "dice/errors.hpp"
#include "dice/json_io.hpp"
#include "dice/stats.hpp"

using nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::string subcommand;
    std::string f_exprs;       // semicolon-separated
    std::string ladder_spec;   // "R:e0,e1,...;..."
    int m = 1;
    int v = -1;                // default: entries - 1
    bool synthesize_last = false;
    std::string die_spec;
    uint64_t seed = 1;
    uint64_t n = 1000;
    int augment = 0;
    std::string auto_logconcave = "on";
    bool strict_randomness = false;
    std::string format = "json";
    std::string out_path;
    std::string trace_path;
    std::string adds = "0";    // bench: augmentation counts
    uint64_t runs = 100;       // bench: runs per cell
    std::string at_p;          // bounds: evaluation point "0.5" or "0.2,0.3,0.5"
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(sep, pos);
        out.push_back(s.substr(pos, next == std::string::npos ? next : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const RunConfig& cfg) {
    std::ostringstream os;
    os << cfg.subcommand << '|' << cfg.f_exprs << '|' << cfg.ladder_spec << '|' << cfg.m << '|'
       << cfg.v << '|' << cfg.die_spec << '|' << cfg.seed << '|' << cfg.n << '|' << cfg.augment
       << '|' << cfg.auto_logconcave << '|' << cfg.strict_randomness;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(os.str())));
    return buf;
}

// "R:e0,e1,...;R:..." with R any constant expression (sqrt(2) included).
std::pair<dice::Ladder, dice::OutcomeMap> parse_ladder_spec(const std::string& spec) {
    dice::Ladder L;
    int nvars = -1;
    for (const std::string& part : split(spec, ';')) {
        if (part.empty()) continue;
        std::size_t colon = part.find(':');
        if (colon == std::string::npos)
            throw dice::ConfigError("ladder state needs R:exponents, got: " + part);
        dice::ExprAst rast = dice::parse(part.substr(0, colon), dice::ParseMode{0, false});
        std::vector<double> zero{1.0};
        double R = dice::evaluate(rast, zero);
        std::vector<int32_t> e;
        for (const std::string& tok : split(part.substr(colon + 1), ','))
            e.push_back(static_cast<int32_t>(std::strtol(tok.c_str(), nullptr, 10)));
        if (nvars < 0) nvars = static_cast<int>(e.size());
        if (nvars != static_cast<int>(e.size()))
            throw dice::ConfigError("inconsistent exponent lengths in ladder spec");
        L.states.push_back({R, dice::Monomial(std::move(e))});
    }
    if (L.states.empty()) throw dice::ConfigError("empty ladder spec");
    L.m = nvars - 1;
    L.sort_canonical();
    return {L, dice::OutcomeMap::identity(L)};
}

dice::DiceEnterprise build_enterprise(const RunConfig& cfg) {
    dice::BuildOptions opt;
    opt.auto_logconcave = cfg.auto_logconcave != "off";
    opt.extra_augment = cfg.augment;
    if (!cfg.ladder_spec.empty()) {
        auto [L, om] = parse_ladder_spec(cfg.ladder_spec);
        return dice::DiceEnterprise::from_ladder(std::move(L), std::move(om), opt);
    }
    if (cfg.f_exprs.empty())
        throw dice::ConfigError("need --f or --ladder");
    std::vector<std::string> exprs = split(cfg.f_exprs, ';');
    int v = cfg.v >= 0 ? cfg.v
                       : static_cast<int>(exprs.size()) - (cfg.synthesize_last ? 0 : 1);
    return dice::DiceEnterprise::from_expressions(exprs, cfg.m, v, cfg.synthesize_last, opt);
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream f(cfg.out_path, std::ios::binary);
        f << text;
    }
}

std::vector<double> parse_point(const std::string& s, int m) {
    std::vector<double> p;
    for (const std::string& tok : split(s, ','))
        p.push_back(std::strtod(tok.c_str(), nullptr));
    if (static_cast<int>(p.size()) == 1 && m == 1) p = {1.0 - p[0], p[0]};
    if (static_cast<int>(p.size()) != m + 1)
        throw dice::ConfigError("point needs m+1 coordinates");
    return p;
}

int cmd_build(const RunConfig& cfg) {
    dice::DiceEnterprise e = build_enterprise(cfg);
    ordered_json j;
    j["plan"] = dice::to_json(e.plan());
    uint64_t nnz = 0;
    for (const auto& faces : e.kernel().row)
        for (const auto& lst : faces) nnz += lst.size();
    j["kernel"]["states"] = e.kernel().k1;
    j["kernel"]["degree"] = e.plan().ladder.degree();
    j["kernel"]["fine"] = e.plan().fine;
    j["kernel"]["connected"] = e.plan().connected;
    j["kernel"]["v_nonzero"] = nnz;
    j["kernel"]["monotone_sampler"] = e.monotone();
    j["kernel"]["dump"] = dice::to_json(e.kernel());
    if (cfg.format == "table") {
        std::string out = j.dump(2);
        out += "\nP(p) =\n" + dice::pretty_print_P(e.kernel(), e.plan().ladder);
        emit(cfg, out);
    } else {
        emit(cfg, j.dump(2));
    }
    return 0;
}

dice::SampleStats run_samples(const RunConfig& cfg, const dice::DiceEnterprise& e,
                              dice::DieSource& die, dice::CftpRun* first_run) {
    dice::SampleOptions sopt;
    sopt.mode.kind = cfg.strict_randomness ? dice::RandomnessMode::DieDerived
                                           : dice::RandomnessMode::Prng;
    sopt.mode.seed = cfg.seed ^ 0x9e3779b97f4a7c15ull;
    sopt.first_run = first_run;
    return e.sample(die, cfg.n, sopt);
}

void write_trace(const RunConfig& cfg, const dice::CftpRun& run) {
    std::ofstream f(cfg.trace_path, std::ios::binary);
    f << "t,B,U,states\n";
    for (std::size_t it = 0; it < run.trace.size(); ++it) {
        std::size_t t = it < run.B.size() ? it : run.B.size() - 1;
        f << "-" << (t + 1) << "," << static_cast<int>(run.B[t]) << "," << run.U[t];
        for (int s : run.trace[it]) f << "," << s;
        f << "\n";
    }
}

int cmd_sample(const RunConfig& cfg, bool validate) {
    dice::DiceEnterprise e = build_enterprise(cfg);
    auto die = dice::make_die(cfg.die_spec, cfg.seed, e.m() + 1);
    dice::CftpRun first;
    first.want_trace = !cfg.trace_path.empty();
    dice::SampleStats stats = run_samples(cfg, e, *die, &first);
    if (!cfg.trace_path.empty()) write_trace(cfg, first);

    ordered_json j;
    j["n"] = stats.n;
    j["counts"] = stats.counts;
    std::vector<double> freq(stats.counts.size());
    for (std::size_t i = 0; i < freq.size(); ++i)
        freq[i] = static_cast<double>(stats.counts[i]) / stats.n;
    j["freq"] = freq;
    j["mean_N"] = stats.mean_rolls;
    j["sd_N"] = stats.sd_rolls;
    j["mean_uniforms"] = stats.mean_uniforms;
    j["total_rolls"] = stats.total_rolls;
    j["seed"] = cfg.seed;

    if (validate) {
        auto* sim = dynamic_cast<dice::SimulatedDie*>(die.get());
        if (!sim)
            throw dice::ConfigError(
                "validate needs a simulated die; the true distribution of an external die "
                "is unknown");
        std::vector<double> truth = e.true_distribution(sim->probs());
        j["true"] = truth;
        double z = dice::normal_quantile(1.0 - 0.05 / (2.0 * freq.size()));
        std::vector<double> lo(freq.size()), hi(freq.size());
        bool in_ci = true;
        for (std::size_t i = 0; i < freq.size(); ++i) {
            double half = z * std::sqrt(truth[i] * (1.0 - truth[i]) / stats.n);
            lo[i] = truth[i] - half;
            hi[i] = truth[i] + half;
            if (freq[i] < lo[i] || freq[i] > hi[i]) in_ci = false;
        }
        j["ci_low"] = lo;
        j["ci_high"] = hi;
        j["in_ci"] = in_ci;
        dice::GofResult gof = dice::chi_square_gof(stats.counts, truth);
        j["chi_square"]["stat"] = gof.stat;
        j["chi_square"]["df"] = gof.df;
        j["chi_square"]["p_value"] = gof.p_value;
    }

    if (cfg.format == "table") {
        std::ostringstream os;
        os << "outcome  count  freq\n";
        for (std::size_t i = 0; i < freq.size(); ++i)
            os << i << "  " << stats.counts[i] << "  " << freq[i] << "\n";
        os << "mean N = " << stats.mean_rolls << " (sd " << stats.sd_rolls << ")\n";
        emit(cfg, os.str());
    } else {
        emit(cfg, j.dump(2));
    }
    return 0;
}

int cmd_bench(const RunConfig& cfg) {
    std::ostringstream os;
    os << "config_hash,augmentations,runs,mean_N,sd_N,mean_uniforms\n";
    std::string hash = config_hash(cfg);
    for (const std::string& tok : split(cfg.adds, ',')) {
        int add = static_cast<int>(std::strtol(tok.c_str(), nullptr, 10));
        RunConfig cell = cfg;
        cell.augment = add;
        cell.auto_logconcave = "off";  // the sweep controls the augmentation count
        cell.n = cfg.runs;
        cell.seed = cfg.seed + 1000003ull * static_cast<uint64_t>(add);
        dice::DiceEnterprise e = build_enterprise(cell);
        auto die = dice::make_die(cell.die_spec, cell.seed, e.m() + 1);
        dice::SampleStats stats = run_samples(cell, e, *die, nullptr);
        char line[256];
        std::snprintf(line, sizeof(line), "%s,%d,%llu,%.17g,%.17g,%.17g\n", hash.c_str(), add,
                      static_cast<unsigned long long>(stats.n), stats.mean_rolls, stats.sd_rolls,
                      stats.mean_uniforms);
        os << line;
    }
    emit(cfg, os.str());
    return 0;
}

int cmd_bounds(const RunConfig& cfg) {
    dice::DiceEnterprise e = build_enterprise(cfg);
    std::optional<std::vector<double>> point;
    if (!cfg.at_p.empty()) point = parse_point(cfg.at_p, e.m());
    dice::BoundsReport rep = e.bounds(point);
    if (cfg.format == "table") {
        std::ostringstream os;
        os << "states: " << rep.k_states << "  degree: " << rep.degree << "\n";
        os << "min positive V entry: " << rep.min_v << "\n";
        if (rep.rho) {
            os << "rho: " << *rep.rho << "\n";
            os << "tail: P(N >= n) <~ " << *rep.tail_coeff << " * rho^n\n";
            if (rep.mean_bound_geom) os << "mean bound: " << *rep.mean_bound_geom << "\n";
        } else {
            os << "rho: " << (rep.rho_note.empty() ? "n/a" : rep.rho_note) << "\n";
        }
        if (rep.prop_bound) os << "roll bound at p: " << *rep.prop_bound << "\n";
        else if (!rep.prop_note.empty()) os << "roll bound: " << rep.prop_note << "\n";
        if (rep.uniform_bound) os << "uniform-in-p bound: " << *rep.uniform_bound << "\n";
        if (rep.exact_en_p0) os << "exact E[N] at p=0: " << *rep.exact_en_p0 << "\n";
        if (rep.exact_en_p1) os << "exact E[N] at p=1: " << *rep.exact_en_p1 << "\n";
        emit(cfg, os.str());
    } else {
        emit(cfg, dice::to_json(rep).dump(2));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Exact sampling from rational functions of unknown die probabilities"};
    app.require_subcommand(1);

    auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--f", cfg.f_exprs, "target expressions, ';'-separated");
        sub->add_option("--ladder", cfg.ladder_spec, "direct ladder: R:e0,e1,...;R:...");
        sub->add_option("--m", cfg.m, "simplex dimension (die faces - 1)");
        sub->add_option("--v", cfg.v, "output dimension (target faces - 1)");
        sub->add_flag("--synthesize-last", cfg.synthesize_last,
                      "append the complement entry 1 - sum(f)");
        sub->add_option("--die", cfg.die_spec, "die source: sim:p0,p1,... or cmd:<program>");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--n", cfg.n, "number of samples");
        sub->add_option("--augment", cfg.augment, "extra augmentations after construction");
        sub->add_option("--auto-logconcave", cfg.auto_logconcave, "on|off (default on, m=1)")
            ->check(CLI::IsMember({"on", "off"}));
        sub->add_flag("--strict-randomness", cfg.strict_randomness,
                      "derive uniforms from die rolls instead of a seeded generator");
        sub->add_option("--format", cfg.format, "json|csv|table")
            ->check(CLI::IsMember({"json", "csv", "table"}));
        sub->add_option("--out", cfg.out_path, "write output to a file");
        sub->add_option("--trace", cfg.trace_path, "debug: CSV trace of the first run");
    };

    CLI::App* build = app.add_subcommand("build", "construct and print the plan");
    CLI::App* sample = app.add_subcommand("sample", "draw exact samples");
    CLI::App* validate = app.add_subcommand("validate", "sample and test against the truth");
    CLI::App* bench = app.add_subcommand("bench", "mean rolls per augmentation count");
    CLI::App* bounds = app.add_subcommand("bounds", "efficiency bounds for the plan");
    for (CLI::App* sub : {build, sample, validate, bench, bounds}) add_shared(sub);
    bench->add_option("--adds", cfg.adds, "augmentation counts, comma-separated");
    bench->add_option("--runs", cfg.runs, "runs per cell");
    bounds->add_option("--at", cfg.at_p, "evaluation point: p or p0,p1,...");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) return cmd_build(cfg);
        if (sample->parsed()) return cmd_sample(cfg, false);
        if (validate->parsed()) return cmd_sample(cfg, true);
        if (bench->parsed()) return cmd_bench(cfg);
        if (bounds->parsed()) return cmd_bounds(cfg);
    } catch (const dice::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dice::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dice::CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const dice::IterationCapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const dice::NonterminationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const dice::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
