#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polyan/analyzer.hpp"
#include "polyan/calc.hpp"
#include "polyan/hybrid.hpp"
#include "polyan/imp.hpp"
#include "polyan/text.hpp"

using namespace polyan;

namespace {

enum class Format { text, lines };

struct Failure {
    int code;
    std::string msg;
};

std::string slurp(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{1, "cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// POLYAN_MAX_BITS bounds the coefficient size of every reported constraint.
void check_bits(const Polyhedron& p) {
    const char* env = std::getenv("POLYAN_MAX_BITS");
    if (!env) return;
    const std::size_t limit = std::strtoul(env, nullptr, 10);
    for (const auto& c : p.minimized_constraints()) {
        std::size_t bits = mpz_sizeinbase(c.rhs().get_mpz_t(), 2);
        for (const auto& a : c.coefficients()) bits = std::max(bits, mpz_sizeinbase(a.get_mpz_t(), 2));
        if (bits > limit) throw Failure{2, "coefficient exceeds " + std::to_string(limit) + " bits"};
    }
}

std::string render_set(const PolySet& s, const std::vector<std::string>& names) {
    if (s.is_bottom()) return render(Polyhedron::empty(s.dimension(), s.topology()), names);
    std::string out;
    for (const auto& p : s.elements()) {
        check_bits(p);
        out += (out.empty() ? "" : " | ") + render(p, names);
    }
    return out;
}

DomainKind domain_of(const std::string& d) { return d == "powerset" ? DomainKind::powerset : DomainKind::poly; }

int cmd_analyze(const std::string& path, const std::string& assume, const std::string& domain, std::size_t delay,
                std::size_t cap, Format fmt) {
    imp::Program prog = imp::parse_program(slurp(path));
    Polyhedron init = Polyhedron::from_constraints(prog.vars.size(), parse_constraints(assume, prog.vars));
    AnalysisOptions o;
    o.domain = domain_of(domain);
    o.delay = delay;
    o.cap = cap;
    std::optional<AnalysisResult> res;
    try {
        res.emplace(analyze(prog, init, o));
    } catch (const EngineError& e) {
        throw Failure{2, e.what()};
    }
    const AnalysisResult& r = *res;
    for (std::size_t id = 0; id < prog.points.size(); ++id) {
        const imp::Stmt& s = *prog.points[id];
        auto head = r.loop_heads.find(id);
        const AbstractStore& st = head != r.loop_heads.end() ? head->second : r.entry[id];
        std::string sys = render_set(st.value(), prog.vars);
        if (fmt == Format::lines)
            std::cout << id << "\t" << sys << "\n";
        else
            std::cout << "point " << id << " (" << s.pos.line << ":" << s.pos.col << "): " << sys << "\n";
    }
    std::string sys = render_set(r.exit.value(), prog.vars);
    std::cout << (fmt == Format::lines ? "exit\t" : "exit: ") << sys << "\n";
    return 0;
}

std::vector<std::size_t> projection_dims(const HybridAutomaton& h, const std::string& spec,
                                         std::vector<std::string>& names) {
    std::vector<std::size_t> dims;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        auto it = std::find(h.vars.begin(), h.vars.end(), item);
        if (it == h.vars.end()) throw Failure{1, "unknown variable '" + item + "' in --project"};
        dims.push_back(static_cast<std::size_t>(it - h.vars.begin()));
        names.push_back(item);
    }
    return dims;
}

int cmd_reach(const std::string& path, const std::string& domain, std::size_t max_iter, std::size_t cap,
              std::size_t delay, const std::string& project, const std::string& schedule, bool parallel, Format fmt) {
    HybridAutomaton h = parse_automaton(slurp(path));
    std::vector<std::string> names = h.vars;
    std::vector<std::size_t> dims;
    if (!project.empty()) {
        names.clear();
        dims = projection_dims(h, project, names);
    }
    ReachOptions o;
    o.domain = domain_of(domain);
    o.max_iter = max_iter;
    o.cap = cap;
    o.delay = delay;
    o.schedule = schedule == "jacobi" ? Schedule::jacobi : Schedule::gauss_seidel;
    o.parallel = parallel;
    ReachResult r = reach(h, o);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    if (!r.converged) throw Failure{3, "no fixpoint after " + std::to_string(r.sweeps) + " sweeps"};
    std::cerr << "converged after " << r.iterations << " iterations\n";
    auto view = [&](const PolySet& reg) {
        if (project.empty()) return reg;
        std::vector<Polyhedron> parts;
        for (const auto& p : reg.elements()) parts.push_back(p.project_onto(dims));
        return PolySet::reduce(dims.size(), reg.topology(), std::move(parts));
    };
    for (std::size_t l = 0; l < h.locations.size(); ++l) {
        const std::string& name = h.locations[l].name;
        const PolySet reg = view(r.regions[l]);
        if (o.domain == DomainKind::powerset)
            for (std::size_t i = 0; i < reg.size(); ++i) {
                check_bits(reg.elements()[i]);
                std::string sys = render(reg.elements()[i], names);
                if (fmt == Format::lines)
                    std::cout << name << "[" << i + 1 << "]\t" << sys << "\n";
                else
                    std::cout << name << " [" << i + 1 << "]: " << sys << "\n";
            }
        Polyhedron hull = reg.collapse();
        check_bits(hull);
        std::cout << name << (fmt == Format::lines ? "\t" : ": ") << render(hull, names) << "\n";
    }
    return 0;
}

int cmd_poly(const std::string& path, const std::string& inline_script) {
    std::string script = inline_script.empty() ? slurp(path) : inline_script;
    run_calculator(script, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polyhedral analysis of imperative programs and linear hybrid automata"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "lines"}));

    std::string file, assume, domain = "poly", project, schedule = "gauss-seidel", inline_script;
    std::size_t delay = 0, cap = 4, max_iter = 100;
    bool parallel = false;

    auto* an = app.add_subcommand("analyze", "Infer invariants of an IMP program");
    an->add_option("file", file, "Program file")->required();
    an->add_option("--assume", assume, "Constraints on the initial store");
    an->add_option("--domain", domain)->check(CLI::IsMember({"poly", "powerset"}));
    an->add_option("--delay", delay, "Joins before widening at a loop");
    an->add_option("--cap", cap, "Powerset size bound")->check(CLI::PositiveNumber);

    auto* re = app.add_subcommand("reach", "Reachable regions of a linear hybrid automaton");
    re->add_option("file", file, ".lha file")->required();
    re->add_option("--domain", domain)->check(CLI::IsMember({"poly", "powerset"}));
    re->add_option("--max-iter", max_iter, "Sweep limit")->check(CLI::PositiveNumber);
    re->add_option("--cap", cap, "Powerset size bound")->check(CLI::PositiveNumber);
    re->add_option("--delay", delay, "Sweeps before widening");
    re->add_option("--project", project, "Comma separated variables to keep");
    re->add_option("--schedule", schedule)->check(CLI::IsMember({"gauss-seidel", "jacobi"}));
    re->add_flag("--parallel", parallel, "Evaluate Jacobi sweeps on several threads");

    auto* po = app.add_subcommand("poly", "Polyhedra desk calculator");
    po->add_option("script", file, "Script file, - for standard input");
    po->add_option("-e", inline_script, "Script text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    Format fmt = format == "lines" ? Format::lines : Format::text;
    try {
        if (an->parsed()) return cmd_analyze(file, assume, domain, delay, cap, fmt);
        if (re->parsed()) return cmd_reach(file, domain, max_iter, cap, delay, project, schedule, parallel, fmt);
        if (file.empty() && inline_script.empty()) throw Failure{1, "poly needs a script file or -e"};
        return cmd_poly(file, inline_script);
    } catch (const Failure& f) {
        std::cerr << "polyan: " << f.msg << "\n";
        return f.code;
    } catch (const ParseError& e) {
        std::cerr << "polyan: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "polyan: " << e.what() << "\n";
        return an->parsed() || po->parsed() ? 1 : 2;
    }
}
