#include "cli.hpp"

#include "posctl/drugdesign.hpp"
#include "posctl/error.hpp"
#include "posctl/io.hpp"
#include "posctl/leadersel.hpp"
#include "posctl/metrics.hpp"
#include "posctl/numerics.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace posctl::cli {

namespace {

using io::json;

struct Global {
    int threads = 0;
    int max_iter = 500;
    double tol = 1e-6;
    std::string out;
};

SolverOptions solver_options(const Global& g) {
    SolverOptions o;
    o.max_iter = g.max_iter;
    o.max_inner = g.max_iter;
    o.tol = g.tol;
    return o;
}

std::string num17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string join_one_based(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i] + 1);
    return s;
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty() || path == "-") {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    f << text;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json blocks_json(const BlockStructure& bs) {
    json a = json::array();
    for (const auto& b : bs.blocks) {
        json states = json::array();
        for (int i : b.states) states.push_back(i + 1);
        a.push_back(states);
    }
    return a;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const std::string& path, const std::string& kind, std::ostream& out, std::ostream& err) {
    const std::string text = io::read_file(path);
    bool network = kind == "network";
    if (kind == "auto") {
        if (has_suffix(path, ".csv")) {
            network = true;
        } else {
            const json j = json::parse(text, nullptr, false);
            network = j.is_object() && j.contains("n");
        }
    }

    if (network) {
        std::optional<DirectedNetwork> net;
        try {
            net.emplace(has_suffix(path, ".csv") ? io::parse_network_csv(text) : io::parse_network_json(text));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError) throw;
            err << "violation: network: " << e.what() << "\n";
            return 1;
        }
        json subsets = json::array();
        for (const auto& s : net->leader_subsets().subsets) {
            json a = json::array();
            for (int i : s) a.push_back(i + 1);
            subsets.push_back(a);
        }
        out << io::dump({{"valid", true},
                         {"kind", "network"},
                         {"n", net->size()},
                         {"edges", net->edges().size()},
                         {"weakly_connected", net->is_weakly_connected()},
                         {"strongly_connected", net->is_strongly_connected()},
                         {"balanced", net->is_balanced()},
                         {"leader_subsets", subsets}});
        return 0;
    }

    const PositiveSystem sys = io::parse_system(text);
    const auto violations = validate(sys);
    for (const auto& v : violations) {
        err << "violation: " << v.matrix;
        if (v.row >= 0) err << "(" << v.row + 1 << "," << v.col + 1 << ") = " << num17(v.value);
        err << ": " << v.message << "\n";
    }
    if (!violations.empty()) return 1;
    BlockStructure bs;
    try {
        bs = block_structure(sys);
    } catch (const Error& e) {
        err << "violation: blocks: " << e.what() << "\n";
        return 1;
    }
    out << io::dump({{"valid", true},
                     {"kind", "system"},
                     {"states", sys.states()},
                     {"controls", sys.controls()},
                     {"blocks", blocks_json(bs)}});
    return 0;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
    std::string sys, net, u, metric = "h2";
};

json eval_json(const PositiveSystem& sys, const Vector& u, Metric metric) {
    if (u.size() != sys.controls()) {
        throw Error(ErrorCode::DimensionMismatch, "u has " + std::to_string(u.size()) + " entries, the system has " +
                                                      std::to_string(sys.controls()) + " controls");
    }
    const Matrix Acl = closed_loop(sys, u);
    const double abscissa = spectral_abscissa(Acl);
    const bool hurwitz = abscissa < kHurwitzMargin;
    const double J = metric == Metric::H2 ? j2(sys, u) : jinf(sys, u);

    json j;
    j["metric"] = std::string(to_string(metric));
    j["J"] = io::number(J);
    j[metric == Metric::H2 ? "J2" : "Jinf"] = io::number(J);
    j["hurwitz"] = hurwitz;
    j["spectral_abscissa"] = io::number(abscissa);
    if (metric == Metric::H2) {
        try {
            j["blocks"] = blocks_json(block_structure(sys));
        } catch (const Error&) {
            j["blocks"] = nullptr;  // H2 does not need a block decomposition
        }
        if (hurwitz) j["gradient"] = io::to_json(grad_j2(sys, u));
    } else {
        const BlockStructure bs = block_structure(sys);
        j["blocks"] = blocks_json(bs);
        if (hurwitz) {
            const SubgradientBundle b = jinf_blocks(sys, u);
            if (b.blocks.size() == 1) j["gradient"] = io::to_json(b.blocks.front().gradient);
            j["bundle"] = io::to_json(b);
        }
    }
    return j;
}

int cmd_eval(const EvalArgs& a, const Global& g, std::ostream& out) {
    const PositiveSystem sys = a.net.empty() ? io::load_system(a.sys) : leader_system(io::load_network(a.net).laplacian());
    const json j = eval_json(sys, io::parse_vector(a.u), parse_metric(a.metric));
    write_text(g.out, io::dump(j), out);
    return 0;
}

// ----------------------------------------------------------- leader-select

struct LeaderArgs {
    std::string net, metric = "h2", strategy = "best-of", csv;
    int n_leaders = 1;
    double kappa = 1.0;
    bool sweep = false;
};

int cmd_leader_select(const LeaderArgs& a, const Global& g, std::ostream& out) {
    const DirectedNetwork net = io::load_network(a.net);
    const Metric metric = parse_metric(a.metric);
    const Strategy strategy = parse_strategy(a.strategy);
    const int subsets = static_cast<int>(net.leader_subsets().subsets.size());
    if (a.n_leaders < subsets) {
        throw Error(ErrorCode::Infeasible, "N = " + std::to_string(a.n_leaders) + " is below the " +
                                               std::to_string(subsets) + " leader subsets; no leader set stabilizes");
    }

    std::vector<std::pair<int, LeaderResult>> rows;
    for (int N = a.sweep ? subsets : a.n_leaders; N <= a.n_leaders; ++N) {
        LeaderProblem p{net, N, a.kappa, metric};
        rows.emplace_back(N, select_leaders(p, strategy, solver_options(g), g.threads));
    }

    json j;
    if (a.sweep) {
        json arr = json::array();
        for (const auto& [N, r] : rows) {
            json item = {{"N", N}};
            item.update(io::to_json(r));
            arr.push_back(item);
        }
        j = {{"metric", std::string(to_string(metric))}, {"strategy", std::string(to_string(strategy))}, {"sweep", arr}};
    } else {
        j = io::to_json(rows.front().second);
    }
    write_text(g.out, io::dump(j), out);

    if (!a.csv.empty()) {
        std::ostringstream csv;
        csv << "N,J,J_lb,gap_percent,leaders\n";
        for (const auto& [N, r] : rows) {
            csv << N << ',' << num17(r.J) << ',' << num17(r.J_lb) << ',' << num17(100.0 * r.gap) << ','
                << join_one_based(r.leaders) << '\n';
        }
        write_text(a.csv, csv.str(), out);
    }
    return 0;
}

// ------------------------------------------------------------- drug-design

struct DrugArgs {
    std::string sys, mode, metric = "h2", csv;
    double budget = 0.0;
    int target = -1;
    double penalty = -1.0;  // R = penalty * I
};

int cmd_drug_design(const DrugArgs& a, const Global& g, std::ostream& out, std::ostream& err) {
    TherapyProblem p{io::load_system(a.sys), parse_metric(a.metric), Matrix()};
    const SolverOptions opts = solver_options(g);

    if (a.mode == "budget") {
        if (a.target >= 0) throw Error(ErrorCode::InvalidArgument, "--target-drugs belongs to --mode sparse");
        if (a.penalty > 0.0) p.R = a.penalty * Matrix::Identity(p.sys.controls(), p.sys.controls());
        const SolveReport rep = budget_design(p, a.budget, opts);
        const double J = p.metric == Metric::H2 ? j2(p.sys, rep.u) : jinf(p.sys, rep.u);
        json j = {{"mode", "budget"},
                  {"metric", std::string(to_string(p.metric))},
                  {"budget", io::number(a.budget)},
                  {"J", io::number(J)},
                  {"sum", io::number(rep.u.sum())}};
        j.update(io::to_json(rep));
        write_text(g.out, io::dump(j), out);
        return 0;
    }

    if (a.budget > 0.0) throw Error(ErrorCode::InvalidArgument, "--budget belongs to --mode budget");
    if (a.target < 0) throw Error(ErrorCode::InvalidArgument, "--mode sparse needs --target-drugs");
    const double r = a.penalty > 0.0 ? a.penalty : 1.0;
    p.R = r * Matrix::Identity(p.sys.controls(), p.sys.controls());

    HomotopyPath path;
    int code = 0;
    try {
        path = sparsity_homotopy(p, a.target, {}, 0.0, opts);
    } catch (const HomotopyError& e) {
        path = e.path();
        err << "error: " << e.what() << "\n";
        code = 1;
    }
    const auto rows = degradation_report(path);
    json degradation = json::array();
    for (const auto& row : rows) degradation.push_back({{"N", row.N}, {"percent", io::number(row.percent)}});
    json j = {{"mode", "sparse"}, {"metric", std::string(to_string(p.metric))}, {"target", a.target}};
    j.update(io::to_json(path));
    j["degradation"] = degradation;
    write_text(g.out, io::dump(j), out);

    if (!a.csv.empty()) {
        std::ostringstream csv;
        csv << "N,degradation_percent\n";
        for (const auto& row : rows) csv << row.N << ',' << num17(row.percent) << '\n';
        write_text(a.csv, csv.str(), out);
    }
    return code;
}

// ----------------------------------------------------------------- project

struct ProjectArgs {
    std::string y, set = "simplex", net;
    double total = 1.0, kappa = 1.0;
    int n_leaders = 1;
};

int cmd_project(const ProjectArgs& a, const Global& g, std::ostream& out) {
    const Vector y = io::parse_vector(a.y);
    ConstraintSet set;
    if (a.set == "nonneg") {
        set = ConstraintSet::nonneg();
    } else if (a.set == "simplex") {
        set = ConstraintSet::simplex(a.total);
    } else if (a.set == "capped") {
        set = ConstraintSet::capped(a.n_leaders, a.kappa);
    } else if (a.set == "floors") {
        if (a.net.empty()) throw Error(ErrorCode::InvalidArgument, "--set floors needs --net for the leader subsets");
        set = ConstraintSet::capped_with_floors(a.n_leaders, a.kappa, io::load_network(a.net).leader_subsets().subsets);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown set '" + a.set + "'");
    }
    const Vector u = set.project(y);
    write_text(g.out, io::dump({{"set", a.set}, {"u", io::to_json(u)}, {"distance", io::number((u - y).norm())}}), out);
    return 0;
}

int exit_code(ErrorCode c) {
    switch (c) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch: return 2;
    default: return 1;
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Structured decentralized control of positive systems"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file");

    Global g;
    app.add_option("--threads", g.threads, "worker threads for exhaustive search (0 = all cores)")
        ->envname("POSCTL_THREADS")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--max-iter", g.max_iter, "solver iteration limit")->check(CLI::PositiveNumber);
    app.add_option("--tol", g.tol, "solver stationarity tolerance")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "write JSON here instead of standard output");

    std::string validate_path, validate_kind = "auto";
    auto* v = app.add_subcommand("validate", "check a system or network file");
    v->add_option("path", validate_path, "system JSON, network JSON or network CSV")->required();
    v->add_option("--kind", validate_kind)->check(CLI::IsMember({"auto", "system", "network"}));

    EvalArgs ea;
    auto* e = app.add_subcommand("eval", "evaluate J and its gradient or subgradient bundle at u");
    auto* e_sys = e->add_option("--sys", ea.sys, "system JSON");
    auto* e_net = e->add_option("--net", ea.net, "network; evaluates the leader model");
    e_sys->excludes(e_net);
    e->add_option("--u", ea.u, "control vector, e.g. 1,2.5")->required();
    e->add_option("--metric", ea.metric)->check(CLI::IsMember({"h2", "hinf"}));

    LeaderArgs la;
    auto* l = app.add_subcommand("leader-select", "choose N leaders of a directed consensus network");
    l->add_option("--net", la.net, "network JSON or CSV")->required();
    l->add_option("--n-leaders", la.n_leaders, "number of leaders (largest N with --sweep)")
        ->required()
        ->check(CLI::PositiveNumber);
    l->add_option("--kappa", la.kappa, "leader feedback gain")->check(CLI::PositiveNumber);
    l->add_option("--metric", la.metric)->check(CLI::IsMember({"h2", "hinf"}));
    l->add_option("--strategy", la.strategy)->check(CLI::IsMember({"round", "swap", "undirected", "best-of", "exhaustive"}));
    l->add_flag("--sweep", la.sweep, "run every N from the number of leader subsets up to --n-leaders");
    l->add_option("--csv", la.csv, "write the N, J, J_lb, gap table here");

    DrugArgs da;
    auto* d = app.add_subcommand("drug-design", "design combination doses");
    d->add_option("--sys", da.sys, "system JSON")->required();
    d->add_option("--mode", da.mode)->required()->check(CLI::IsMember({"budget", "sparse"}));
    auto* d_budget = d->add_option("--budget", da.budget, "total dose")->check(CLI::PositiveNumber);
    auto* d_target = d->add_option("--target-drugs", da.target, "largest acceptable drug count")
                         ->check(CLI::NonNegativeNumber);
    d_budget->excludes(d_target);
    d->add_option("--metric", da.metric)->check(CLI::IsMember({"h2", "hinf"}));
    d->add_option("--penalty", da.penalty, "dose penalty r, R = r I (sparse default 1, budget default none)")
        ->check(CLI::PositiveNumber);
    d->add_option("--csv", da.csv, "write the N, degradation table here");

    ProjectArgs pa;
    auto* p = app.add_subcommand("project", "Euclidean projection onto a constraint set");
    p->add_option("--y", pa.y, "point to project")->required();
    p->add_option("--set", pa.set)->check(CLI::IsMember({"nonneg", "simplex", "capped", "floors"}));
    p->add_option("--total", pa.total, "simplex total")->check(CLI::PositiveNumber);
    p->add_option("--n-leaders", pa.n_leaders)->check(CLI::PositiveNumber);
    p->add_option("--kappa", pa.kappa)->check(CLI::PositiveNumber);
    p->add_option("--net", pa.net, "network whose leader subsets give the floors");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (v->parsed()) return cmd_validate(validate_path, validate_kind, out, err);
        if (e->parsed()) {
            if (ea.sys.empty() == ea.net.empty()) {
                err << "error: eval needs exactly one of --sys and --net\n";
                return 2;
            }
            return cmd_eval(ea, g, out);
        }
        if (l->parsed()) return cmd_leader_select(la, g, out);
        if (d->parsed()) {
            if (da.mode == "budget" && d_budget->count() == 0) {
                err << "error: --mode budget needs --budget\n";
                return 2;
            }
            if (da.mode == "sparse" && d_target->count() == 0) {
                err << "error: --mode sparse needs --target-drugs\n";
                return 2;
            }
            return cmd_drug_design(da, g, out, err);
        }
        if (p->parsed()) return cmd_project(pa, g, out);
    } catch (const Error& ex) {
        err << "error: " << ex.what() << "\n";
        return exit_code(ex.code());
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace posctl::cli
