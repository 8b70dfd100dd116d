// Command-line front end: single-value evaluation, verification suites, and
// parameter sweeps with machine-readable output.
//
// Exit codes: 0 success / all checks pass, 1 evaluation or verification
// failure, 2 usage or configuration error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtrace/fv.hpp"
#include "qtrace/macdonald.hpp"
#include "qtrace/trace.hpp"
#include "qtrace/verify.hpp"

using namespace qtrace;
using nlohmann::json;

namespace {

struct CliConfig {
    std::string q = "0.95", q2l = "0.02", q2w = "1e-5", q2m = "2e-3", q2k = "0.15";
    int mu = 0, k = 0;
    std::string method = "integral";
    double tol = -1.0;
    std::uint64_t seed = 7;
    int grid_n = 3;
    int jmax = 3;
    int precision_digits = 15;
    std::string out;
    json extra;  // raw config-file contents for classical parameters etc.
};

cplx parse_cplx(const std::string& s) {
    double re = 0, im = 0;
    auto comma = s.find(',');
    try {
        if (comma == std::string::npos) {
            re = std::stod(s);
        } else {
            re = std::stod(s.substr(0, comma));
            im = std::stod(s.substr(comma + 1));
        }
    } catch (const std::exception&) {
        throw CLI::ValidationError("complex value must be 're' or 're,im': " + s);
    }
    return {re, im};
}

cplx json_cplx(const json& j) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_string()) return parse_cplx(j.get<std::string>());
    if (j.is_array() && j.size() == 2) return cplx(j[0].get<double>(), j[1].get<double>());
    throw std::runtime_error("config: complex values are numbers, \"re,im\" strings or [re,im]");
}

void load_config(CliConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config file not found: " + path);
    json j;
    in >> j;
    auto str = [&](const char* key, std::string& dst) {
        if (j.contains(key)) {
            if (j[key].is_string())
                dst = j[key].get<std::string>();
            else {
                std::ostringstream os;
                os.precision(17);
                os << j[key].get<double>();
                dst = os.str();
            }
        }
    };
    str("q", c.q);
    str("q2l", c.q2l);
    str("q2w", c.q2w);
    str("q2m", c.q2m);
    str("q2k", c.q2k);
    if (j.contains("mu")) c.mu = j["mu"].get<int>();
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("method")) c.method = j["method"].get<std::string>();
    if (j.contains("jmax")) c.jmax = j["jmax"].get<int>();
    if (j.contains("precision_digits")) c.precision_digits = j["precision_digits"].get<int>();
    c.extra = j;
}

ParamPoint point_of(const CliConfig& c) {
    return ParamPoint::from_multiplicative(parse_cplx(c.q), parse_cplx(c.q2l), parse_cplx(c.q2w),
                                           parse_cplx(c.q2m), parse_cplx(c.q2k));
}

MacParams mac_of(const CliConfig& c) {
    return MacParams::from_multiplicative(parse_cplx(c.q), parse_cplx(c.q2l), parse_cplx(c.q2w));
}

PrecisionCfg cfg_of(const CliConfig& c) {
    PrecisionCfg cfg;
    cfg.precision_digits = c.precision_digits;
    cfg.validate();
    return cfg;
}

TraceMethod trace_method(const std::string& m) {
    if (m == "integral") return TraceMethod::Integral;
    if (m == "fv") return TraceMethod::FVRelation;
    if (m == "series") return TraceMethod::Series;
    if (m == "jackson") return TraceMethod::Jackson;
    throw CLI::ValidationError("trace method must be integral|fv|series|jackson");
}

ClassicalParams classical_of(const CliConfig& c) {
    ClassicalParams cp;
    if (c.extra.contains("Lambda")) cp.Lambda = json_cplx(c.extra["Lambda"]);
    if (c.extra.contains("Omega")) cp.Omega = json_cplx(c.extra["Omega"]);
    if (c.extra.contains("classical_mu")) cp.mu = json_cplx(c.extra["classical_mu"]);
    if (c.extra.contains("classical_k")) cp.k = json_cplx(c.extra["classical_k"]);
    return cp;
}

cplx eval_subject(const std::string& subject, const CliConfig& c) {
    PrecisionCfg cfg = cfg_of(c);
    if (subject == "fv") {
        ParamPoint p = point_of(c);
        if (c.method == "contour" || c.method == "integral") return fv_contour(p, cfg);
        if (c.method == "series0") return fv_series_at0(p, cfg);
        if (c.method == "seriesinf") return fv_series_atinf(p, cfg);
        throw CLI::ValidationError("fv method must be contour|series0|seriesinf");
    }
    if (subject == "trace") return trace_eval(trace_method(c.method), point_of(c), cfg);
    if (subject == "delta") {
        ParamPoint p = point_of(c);
        return weyl_denominator(p.qb, p.lambda, p.Q2l, p.Q2w, cfg);
    }
    if (subject == "trig") return trig_m1(point_of(c));
    if (subject == "trigres") {
        // relative deviation of the trace from the trigonometric closed form
        ParamPoint p = point_of(c);
        return cplx(rel_err(trace_integral(p, cfg, false), trig_m1(p)), 0.0);
    }
    if (subject == "classical") return classical_rhs(classical_of(c), cfg);
    if (subject == "chi") {
        ChiRoutes r = chi_bgg({c.mu, c.k}, mac_of(c), c.jmax, cfg);
        return (c.method == "bgg") ? r.bgg : r.direct;
    }
    if (subject == "J") return affine_macdonald({c.mu, c.k}, mac_of(c), c.jmax, cfg);
    if (subject == "Jtilde")
        return elliptic_macdonald(c.mu, c.k, mac_of(c), c.jmax, cfg);
    if (subject == "f") {
        MacParams m = mac_of(c);
        return extract_f(m, {m.Q2l, m.Q2l * 0.8, m.Q2l * 1.21}, c.jmax, cfg).f;
    }
    throw CLI::ValidationError("unknown subject: " + subject);
}

struct GridSpec {
    std::string field;
    std::vector<double> values;
};

GridSpec parse_grid(const std::string& s) {
    // field=start:stop:count[:log|lin]
    GridSpec g;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("grid spec: field=start:stop:count[:log]");
    g.field = s.substr(0, eq);
    std::string rest = s.substr(eq + 1);
    std::vector<std::string> parts;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() < 3) throw CLI::ValidationError("grid spec: field=start:stop:count[:log]");
    double a = std::stod(parts[0]), bb = std::stod(parts[1]);
    int n = std::stoi(parts[2]);
    bool logsp = parts.size() > 3 ? parts[3] == "log" : true;
    if (n < 0) throw CLI::ValidationError("grid spec: count must be >= 0");
    for (int i = 0; i < n; ++i) {
        double t = (n == 1) ? 0.0 : double(i) / double(n - 1);
        g.values.push_back(logsp ? std::exp(std::log(a) + t * (std::log(bb) - std::log(a)))
                                 : a + t * (bb - a));
    }
    return g;
}

void write_out(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

std::string json_pair(cplx v) {
    json j = json::array({v.real(), v.imag()});
    return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification CLI for q-series trace-function identities"};
    app.require_subcommand(1);

    CliConfig cfg;
    std::string subject, suite = "all", grid_spec, config_path;

    auto add_params = [&](CLI::App* cmd) {
        cmd->add_option("--q", cfg.q, "base q ('re' or 're,im')");
        cmd->add_option("--q2l", cfg.q2l, "q^{-2 lambda}");
        cmd->add_option("--q2w", cfg.q2w, "q^{-2 omega}");
        cmd->add_option("--q2m", cfg.q2m, "q^{-2 mu}");
        cmd->add_option("--q2k", cfg.q2k, "q^{-2 k}");
        cmd->add_option("--mu", cfg.mu, "integral weight mu");
        cmd->add_option("--k", cfg.k, "integral weight level k");
        cmd->add_option("--method", cfg.method, "evaluation route");
        cmd->add_option("--jmax", cfg.jmax, "bilateral truncation for Macdonald sums");
        cmd->add_option("--precision-digits", cfg.precision_digits, "working precision digits");
        cmd->add_option("--out", cfg.out, "write output to file instead of stdout");
        cmd->add_option("--config", config_path, "JSON config file (flags override)");
    };

    auto* ev = app.add_subcommand("eval", "evaluate one quantity, print [re, im]");
    ev->add_option("--subject", subject,
                   "fv|trace|delta|chi|J|Jtilde|f|trig|trigres|classical")
        ->required();
    add_params(ev);

    auto* vf = app.add_subcommand("verify", "run a verification suite, print a JSON report");
    vf->add_option("--suite", suite, "qcore|fv|trace|symmetry|trig|classical|fock|macdonald|all");
    vf->add_option("--tol", cfg.tol, "override every case tolerance");
    vf->add_option("--seed", cfg.seed, "seed for the point generators");
    vf->add_option("--grid", cfg.grid_n, "grid side for the trace suite");
    add_params(vf);

    auto* sw = app.add_subcommand("sweep", "sweep one ParamPoint field, print CSV");
    sw->add_option("--subject", subject, "fv|trace|delta|chi|J|Jtilde|f|trig|trigres|classical")
        ->required();
    sw->add_option("--grid", grid_spec, "field=start:stop:count[:log|lin]")->required();
    add_params(sw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!config_path.empty()) {
            CLI::App* active = app.got_subcommand(ev) ? ev : app.got_subcommand(vf) ? vf : sw;
            CliConfig from_file = cfg;
            load_config(from_file, config_path);
            // flags given on the command line override config-file keys
            auto keep_flag = [&](const char* flag) { return active->count(flag) > 0; };
            if (!keep_flag("--q")) cfg.q = from_file.q;
            if (!keep_flag("--q2l")) cfg.q2l = from_file.q2l;
            if (!keep_flag("--q2w")) cfg.q2w = from_file.q2w;
            if (!keep_flag("--q2m")) cfg.q2m = from_file.q2m;
            if (!keep_flag("--q2k")) cfg.q2k = from_file.q2k;
            if (!keep_flag("--mu")) cfg.mu = from_file.mu;
            if (!keep_flag("--k")) cfg.k = from_file.k;
            if (!keep_flag("--method")) cfg.method = from_file.method;
            if (!keep_flag("--jmax")) cfg.jmax = from_file.jmax;
            if (!keep_flag("--precision-digits")) cfg.precision_digits = from_file.precision_digits;
            cfg.extra = from_file.extra;
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(ev)) {
            cplx v = eval_subject(subject, cfg);
            write_out(cfg.out, json_pair(v) + "\n");
            return 0;
        }
        if (app.got_subcommand(vf)) {
            SuiteOptions opt;
            opt.seed = cfg.seed;
            opt.tol_override = cfg.tol;
            opt.grid_n = cfg.grid_n;
            opt.cfg.precision_digits = cfg.precision_digits;
            VerificationReport rep = run_suite(suite, opt);
            write_out(cfg.out, report_to_json(rep) + "\n");
            std::cerr << "suite " << rep.suite << ": " << rep.passed << "/" << rep.total
                      << " passed (" << rep.wall_ms << " ms)\n";
            return rep.all_pass() ? 0 : 1;
        }
        if (app.got_subcommand(sw)) {
            GridSpec g = parse_grid(grid_spec);
            std::ostringstream csv;
            csv.precision(17);
            csv << g.field << ",value_re,value_im,error\n";
            for (double v : g.values) {
                CliConfig c = cfg;
                std::ostringstream vs;
                vs.precision(17);
                vs << v;
                if (g.field == "q")
                    c.q = vs.str();
                else if (g.field == "q2l")
                    c.q2l = vs.str();
                else if (g.field == "q2w")
                    c.q2w = vs.str();
                else if (g.field == "q2m")
                    c.q2m = vs.str();
                else if (g.field == "q2k")
                    c.q2k = vs.str();
                else
                    throw CLI::ValidationError("sweep field must be q|q2l|q2w|q2m|q2k");
                csv << v << ",";
                try {
                    cplx val = eval_subject(subject, c);
                    csv << val.real() << "," << val.imag() << ",\n";
                } catch (const std::exception& e) {
                    csv << ",," << e.what() << "\n";
                }
            }
            write_out(cfg.out, csv.str());
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const pole_error& e) {
        std::cerr << "evaluation error (pole): " << e.what() << "\n";
        return 1;
    } catch (const region_error& e) {
        std::cerr << "evaluation error (region): " << e.what() << "\n";
        return 1;
    } catch (const evaluation_error& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
