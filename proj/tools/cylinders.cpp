#include "cylinders/io.hpp"
#include "cylinders/svg.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace cylinders;
using io::json;

namespace {

enum Exit { Ok = 0, Failed = 1, InputError = 2, Precondition = 3 };

struct Options {
    std::string pair, corpus, out, cls, fault;
    std::vector<std::string> spines;
    int bound = 3;
    int order = 0;
    int probes = 3;
    int mark = 0;
    bool json = false;
    bool initial = false;
};

struct Context {
    Options opt;
    std::optional<Base> base;
    io::SpineCorpus corpus;
    std::vector<Spine> spines;

    void load()
    {
        if (!opt.corpus.empty())
            corpus = io::corpus_from(io::read_file(opt.corpus));
        if (!opt.pair.empty())
            base.emplace(io::pair_from(io::read_file(opt.pair)));
        else if (corpus.pair)
            base.emplace(*corpus.pair);
        if (!base)
            throw Error(ErrorKind::Schema, "--pair is required");
        for (const auto& f : opt.spines)
            spines.push_back(io::spine_from(io::read_file(f), "", base->l()));
    }

    int order() const { return std::max(opt.order, opt.bound); }

    ScatteringDiagram diagram(int ord) const
    {
        ScatteringDiagram d0 = initial_diagram(*base, ord);
        return opt.initial ? d0 : complete_diagram(*base, d0, ord);
    }

    const Spine& only_spine() const
    {
        if (spines.size() != 1)
            throw Error(ErrorKind::Schema, "exactly one --spine is required");
        return spines.front();
    }

    std::pair<const Spine&, const Spine&> two_spines() const
    {
        if (spines.size() != 2)
            throw Error(ErrorKind::Schema, "exactly two --spine files are required");
        return {spines[0], spines[1]};
    }
};

void emit(const Options& opt, const json& j, const std::string& text)
{
    if (!opt.out.empty())
        io::write_file(opt.out, opt.json ? io::dump(j) : text);
    else
        std::cout << (opt.json ? io::dump(j) : text);
}

std::string matrix_str(const UniMatrix& m)
{
    return "[[" + m.a().str() + ", " + m.b().str() + "], [" + m.c().str() + ", " + m.d().str() + "]]";
}

/// Invariants of the GL(2,Z) conjugacy class that the summary reports.
json conjugacy(const UniMatrix& m)
{
    Integer tr = m.trace(), det = m.det();
    json j{{"trace", io::to_json(tr)}, {"det", io::to_json(det)}};
    if (m == UniMatrix::identity())
        j["type"] = "identity";
    else if (m == UniMatrix(-1, 0, 0, -1))
        j["type"] = "minus identity";
    else if (det == -1)
        j["type"] = "orientation reversing";
    else if (tr == 2 || tr == -2) {
        Integer s = tr / 2;
        Integer g = gcd(gcd(abs(Integer(m.a() - s)), abs(Integer(m.d() - s))), gcd(abs(m.b()), abs(m.c())));
        j["type"] = tr == 2 ? "unipotent" : "minus unipotent";
        j["index"] = io::to_json(g);
    } else if (abs(tr) < 2)
        j["type"] = "elliptic";
    else
        j["type"] = "hyperbolic";
    return j;
}

int cmd_base(Context& cx)
{
    const Base& b = *cx.base;
    json rays = json::array(), transitions = json::array();
    std::ostringstream t;
    t << "l = " << b.l() << ", d = (";
    for (int i = 0; i < b.l(); ++i)
        t << (i ? ", " : "") << b.data().d[i];
    t << ")\n";
    for (const auto& s : b.data().seeds)
        t << "seed " << s.name << " on ray " << s.ray + 1 << "\n";
    for (int i = 0; i < b.l(); ++i) {
        rays.push_back(io::to_json(b.developed_rays()[i]));
        transitions.push_back(io::to_json(b.chart_transition(i)));
        t << "ray " << i + 1 << ": " << b.developed_rays()[i].str() << "  transition "
          << matrix_str(b.chart_transition(i)) << "\n";
    }
    UniMatrix m = b.monodromy();
    json inv = conjugacy(m);
    if (m == UniMatrix::identity())
        t << "monodromy: identity\n";
    else {
        t << "monodromy: " << matrix_str(m) << " trace " << m.trace().str() << ", det " << m.det().str() << ", "
          << inv["type"].get<std::string>();
        if (inv.contains("index"))
            t << " of index " << inv["index"].dump();
        t << "\n";
    }
    json j{{"pair", io::to_json(b.data())},
           {"rays", rays},
           {"transitions", transitions},
           {"monodromy", io::to_json(m)},
           {"identity", m == UniMatrix::identity()},
           {"conjugacy", inv}};
    emit(cx.opt, j, t.str());
    return Ok;
}

int cmd_spine_validate(Context& cx)
{
    auto vs = validate_spine(*cx.base, cx.only_spine());
    json j{{"ok", vs.empty()}};
    if (!vs.empty())
        j["violations"] = io::to_json(vs);
    std::cout << io::dump(j);
    return vs.empty() ? Ok : Failed;
}

int cmd_spine_extend(Context& cx)
{
    std::cout << io::dump(io::to_json(extend_spine(*cx.base, cx.only_spine())));
    return Ok;
}

int cmd_spine_glue(Context& cx)
{
    auto [a, b] = cx.two_spines();
    Spine g = glue_spines(*cx.base, a, b);
    std::string text = io::dump(io::to_json(g));
    if (!cx.opt.out.empty())
        io::write_file(cx.opt.out, text);
    else
        std::cout << text;
    return Ok;
}

std::string counts_text(const Counts& c)
{
    std::ostringstream t;
    for (const auto& [cls, n] : c)
        t << cls.str() << "  " << n.str() << "\n";
    if (c.empty())
        t << "(no nonzero counts)\n";
    return t.str();
}

int cmd_count(Context& cx)
{
    const Spine& s = cx.only_spine();
    auto d = cx.diagram(cx.order());
    if (!cx.opt.cls.empty()) {
        CurveClass beta = io::class_from(json(cx.opt.cls), "--class");
        if (beta.degree() > cx.opt.bound)
            throw Error(ErrorKind::Schema, "--class: degree exceeds --bound");
        for (const auto& [name, e] : beta.exponents())
            if (std::none_of(cx.base->data().seeds.begin(), cx.base->data().seeds.end(),
                             [&](const auto& sd) { return sd.name == name; }))
                throw Error(ErrorKind::Schema, "--class: unknown generator " + name);
        Integer n = count_at(cylinder_counts(*cx.base, d, s, cx.opt.bound), beta);
        emit(cx.opt, json{{"class", beta.str()}, {"count", n.str()}}, n.str() + "\n");
        return Ok;
    }
    Counts c = cylinder_counts(*cx.base, d, s, cx.opt.bound);
    emit(cx.opt, json{{"bound", cx.opt.bound}, {"counts", io::to_json(c)}}, counts_text(c));
    return Ok;
}

/// SPEC is wall=I[,term=J][,delta=D] with 1-based indices; the corrupted
/// diagram is used only for the glued spine.
ScatteringDiagram inject_fault(const ScatteringDiagram& d, const std::string& text)
{
    std::map<std::string, long long> v{{"wall", 0}, {"term", 1}, {"delta", 1}};
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        std::string key = item.substr(0, eq);
        if (eq == std::string::npos || !v.count(key))
            throw Error(ErrorKind::Schema, "--inject-fault: cannot read '" + item + "'");
        try {
            v[key] = std::stoll(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw Error(ErrorKind::Schema, "--inject-fault: '" + item + "' is not a number");
        }
    }
    long long w = v["wall"], t = v["term"];
    if (w < 1 || w > static_cast<long long>(d.walls.size()))
        throw Error(ErrorKind::Schema, "--inject-fault: the diagram has " + std::to_string(d.walls.size()) + " walls");
    ScatteringDiagram out = d;
    auto& terms = out.walls[w - 1].terms;
    if (t < 1 || t > static_cast<long long>(terms.size()))
        throw Error(ErrorKind::Schema, "--inject-fault: wall " + std::to_string(w) + " has " +
                                           std::to_string(terms.size()) + " terms");
    terms[t - 1].coeff += v["delta"];
    return out;
}

int cmd_verify_gluing(Context& cx)
{
    auto pairs = cx.corpus.pairs;
    if (cx.spines.size() % 2)
        throw Error(ErrorKind::Schema, "--spine files must come in pairs");
    for (std::size_t i = 0; i + 1 < cx.spines.size(); i += 2)
        pairs.emplace_back(cx.spines[i], cx.spines[i + 1]);
    if (pairs.empty())
        throw Error(ErrorKind::Schema, "no spine pairs given");
    auto d = cx.diagram(cx.order());
    std::optional<ScatteringDiagram> faulty;
    if (!cx.opt.fault.empty())
        faulty = inject_fault(d, cx.opt.fault);

    json reports = json::array();
    std::ostringstream t;
    bool failed = false, precondition = false;
    std::size_t passed = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        GluingReport r = verify_gluing(*cx.base, d, pairs[i].first, pairs[i].second, cx.opt.bound,
                                       faulty ? &*faulty : nullptr);
        reports.push_back(io::to_json(r));
        t << "pair " << i + 1 << ": ";
        if (r.precondition) {
            precondition = true;
            t << "not gluable (" << r.precondition->message << ")\n";
            continue;
        }
        t << (r.pass ? "PASS" : "FAIL") << " over " << r.rows.size() << " classes\n";
        for (const auto& row : r.rows)
            if (!row.pass)
                t << "  " << row.cls.str() << ": sum of products " << row.convolution.str() << ", glued "
                  << row.direct.str() << "\n";
        failed = failed || !r.pass;
        passed += r.pass;
    }
    bool pass = !failed && !precondition;
    t << "gluing: " << (pass ? "PASS" : "FAIL") << " (" << passed << "/" << pairs.size() << " pairs)\n";
    emit(cx.opt, json{{"pairs", reports}, {"pass", pass}}, t.str());
    return failed ? Failed : precondition ? Precondition : Ok;
}

std::vector<Spine> all_spines(const Context& cx)
{
    std::vector<Spine> out = cx.spines;
    for (const auto& [a, b] : cx.corpus.pairs) {
        out.push_back(a);
        out.push_back(b);
        out.push_back(glue_spines(*cx.base, a, b));
    }
    for (const auto& s : cx.corpus.straight)
        out.push_back(s);
    if (out.empty())
        throw Error(ErrorKind::Schema, "no spines given");
    return out;
}

int cmd_verify_positivity(Context& cx)
{
    auto spines = all_spines(cx);
    auto r = verify_positivity_integrality(*cx.base, cx.diagram(cx.order()), spines, cx.opt.bound);
    std::ostringstream t;
    for (const auto& f : r.failures)
        t << "spine " << f.spine + 1 << ", " << f.cls.str() << ": " << f.value.str() << " (" << f.reason << ")\n";
    t << "positivity: " << (r.pass() ? "PASS" : "FAIL") << " (" << r.spines << " spines, " << r.counts
      << " nonzero counts, largest " << r.largest.str() << ")\n";
    emit(cx.opt, io::to_json(r), t.str());
    return r.pass() ? Ok : Failed;
}

int cmd_verify_symmetry(Context& cx)
{
    auto spines = all_spines(cx);
    auto d = cx.diagram(cx.order());
    json reports = json::array();
    std::ostringstream t;
    bool pass = true;
    for (std::size_t i = 0; i < spines.size(); ++i) {
        auto probes = sample_probes(*cx.base, d, spines[i], cx.opt.probes);
        SymmetryReport r = verify_symmetry(*cx.base, d, spines[i], probes, cx.opt.bound);
        reports.push_back(io::to_json(r));
        t << "spine " << i + 1 << ": " << (r.pass ? "PASS" : "FAIL") << " at " << r.probes.size() << " probes\n";
        pass = pass && r.pass;
    }
    t << "symmetry: " << (pass ? "PASS" : "FAIL") << "\n";
    emit(cx.opt, json{{"spines", reports}, {"pass", pass}}, t.str());
    return pass ? Ok : Failed;
}

int cmd_verify_straight(Context& cx)
{
    std::vector<Spine> spines = cx.spines;
    for (const auto& s : cx.corpus.straight)
        spines.push_back(s);
    if (spines.empty())
        throw Error(ErrorKind::Schema, "no spines given");
    auto d = cx.diagram(cx.order());
    json reports = json::array();
    std::ostringstream t;
    bool pass = true;
    for (std::size_t i = 0; i < spines.size(); ++i) {
        StraightReport r = verify_straight_spine(*cx.base, d, spines[i], cx.opt.bound);
        reports.push_back(io::to_json(r));
        t << "spine " << i + 1 << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
        pass = pass && r.pass;
    }
    t << "straight: " << (pass ? "PASS" : "FAIL") << "\n";
    emit(cx.opt, json{{"spines", reports}, {"pass", pass}}, t.str());
    return pass ? Ok : Failed;
}

int cmd_verify_rigidity(Context& cx)
{
    const Base& b = *cx.base;
    TropCurve cyl;
    std::size_t n;
    if (cx.spines.size() == 1) {
        const Spine& s = cx.spines.front();
        std::size_t mark = cx.opt.mark ? cx.opt.mark - 1 : s.vertices.size() / 2;
        if (mark >= s.vertices.size())
            throw Error(ErrorKind::Schema, "--mark: the spine has " + std::to_string(s.vertices.size()) + " vertices");
        cyl = make_cylinder(b, s, mark);
        n = 2;
    } else {
        auto [a, c] = cx.two_spines();
        cyl = make_double_cylinder(b, a, c);
        n = 4;
    }
    BfRegion bf = bf_for_cylinders(b, {cyl});
    TropCurve curve = cylinder_to_Bf(b, bf, cyl);
    bool in_T = is_in_T(b, bf, curve, cyl);
    RigidityReport r = rigidity_report(b, bf, curve, n);
    bool pass = in_T && r.rigid();
    std::ostringstream t;
    t << "curve: " << curve.vertices.size() << " vertices, " << curve.edges.size() << " edges, " << n
      << " boundary marks\n";
    t << "in T: " << (in_T ? "yes" : "no") << "\n";
    t << "deformations: " << r.deformations << " of " << r.unknowns << " unknowns, endpoint path moves "
      << r.path_moves << "\n";
    t << "rigidity: " << (pass ? "PASS" : "FAIL") << "\n";
    emit(cx.opt,
         json{{"region", io::to_json(bf)}, {"curve", io::to_json(curve)}, {"in_T", in_T}, {"report", io::to_json(r)},
              {"pass", pass}},
         t.str());
    return pass ? Ok : Failed;
}

int cmd_diagram(Context& cx)
{
    int ord = cx.opt.order ? cx.opt.order : 3;
    auto d = cx.diagram(ord);
    ConsistencyReport r = check_consistency(*cx.base, d, ord);
    std::ostringstream t;
    for (std::size_t i = 0; i < d.walls.size(); ++i) {
        const Wall& w = d.walls[i];
        t << "wall " << i + 1 << (w.line ? " (line)" : "") << " along " << w.dir.str() << ":";
        for (const auto& term : w.terms)
            t << " " << term.coeff.str() << "*" << term.cls.str() << "*z^" << term.k;
        t << "\n";
    }
    if (r.ok)
        t << "consistency: PASS at order " << ord << "\n";
    else
        t << "consistency: FAIL in degree " << r.degree << ", class " << r.cls.str() << ", exponent "
          << r.exponent.str() << "\n";
    emit(cx.opt, json{{"diagram", io::to_json(d)}, {"consistency", io::to_json(r)}}, t.str());
    return r.ok ? Ok : Failed;
}

void write_svg(const Options& opt, const std::string& svg)
{
    if (opt.out.empty())
        std::cout << svg;
    else
        io::write_file(opt.out, svg);
}

int cmd_render_spine(Context& cx)
{
    if (cx.spines.empty())
        throw Error(ErrorKind::Schema, "no spines given");
    write_svg(cx.opt, svg::render_spines(*cx.base, cx.spines));
    return Ok;
}

int cmd_render_glue(Context& cx)
{
    auto [a, b] = cx.two_spines();
    Spine g = glue_spines(*cx.base, a, b);
    write_svg(cx.opt, svg::render_spines(*cx.base, {g}, {{a.vertices.size() - 1}}));
    return Ok;
}

int cmd_render_diagram(Context& cx)
{
    write_svg(cx.opt, svg::render_diagram(*cx.base, cx.diagram(cx.opt.order ? cx.opt.order : 3)));
    return Ok;
}

void report_error(const Error& e, bool json_out)
{
    std::cerr << e.what() << "\n";
    if (json_out)
        std::cout << io::dump(json{{"error", to_string(e.kind())}, {"message", e.what()}});
}

} // namespace

int main(int argc, char** argv)
{
    Options opt;
    CLI::App app{"Cylinder counts on tropical log Calabi-Yau bases"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--pair", opt.pair, "pair file (JSON)");
    app.add_option("--spine", opt.spines, "spine file (JSON); repeat for several");
    app.add_option("--corpus", opt.corpus, "corpus file with a pair, spine pairs and straight spines");
    app.add_option("--class", opt.cls, "curve class such as 0, E or E1^2*E2");
    app.add_option("--bound", opt.bound, "degree bound for curve classes")->check(CLI::Range(0, 12));
    app.add_option("--order", opt.order, "order of the scattering diagram")->check(CLI::Range(1, 12));
    app.add_option("--out", opt.out, "output file");
    app.add_option("--inject-fault", opt.fault, "wall=I[,term=J][,delta=D]: corrupt a wall for the glued run");
    app.add_option("--probes", opt.probes, "probe points per spine for the symmetry check")->check(CLI::Range(1, 50));
    app.add_option("--mark", opt.mark, "vertex of the marked point (1-based)");
    app.add_flag("--json", opt.json, "print JSON");
    app.add_flag("--initial", opt.initial, "use the initial diagram without completing it");

    Context cx;
    std::function<int(Context&)> run;
    bool json_errors = false;
    auto sub = [&](CLI::App* parent, const std::string& name, const std::string& help, int (*f)(Context&),
                   bool always_json = false) {
        parent->add_subcommand(name, help)->callback([&run, &json_errors, f, always_json] {
            run = f;
            json_errors = always_json;
        });
    };
    sub(&app, "base", "summarize the base: rays, transitions, monodromy", cmd_base);
    auto* spine = app.add_subcommand("spine", "validate, extend or glue spines")->require_subcommand(1);
    spine->fallthrough();
    sub(spine, "validate", "check the spine conditions", cmd_spine_validate, true);
    sub(spine, "extend", "extend both ends straight", cmd_spine_extend, true);
    sub(spine, "glue", "glue two spines at their common endpoint", cmd_spine_glue, true);
    sub(&app, "count", "cylinder counts of a spine", cmd_count);
    auto* verify = app.add_subcommand("verify", "check an identity over spines")->require_subcommand(1);
    verify->fallthrough();
    sub(verify, "gluing", "sum over splittings against the glued spine", cmd_verify_gluing);
    sub(verify, "positivity", "counts are nonnegative integers", cmd_verify_positivity);
    sub(verify, "symmetry", "counts do not depend on the probe point", cmd_verify_symmetry);
    sub(verify, "straight", "straight spines count exactly one cylinder", cmd_verify_straight);
    sub(verify, "rigidity", "the retracted (double) cylinder is rigid", cmd_verify_rigidity);
    sub(&app, "diagram", "complete the scattering diagram and check consistency", cmd_diagram);
    auto* render = app.add_subcommand("render", "draw SVG")->require_subcommand(1);
    render->fallthrough();
    sub(render, "spine", "spines with their extensions", cmd_render_spine);
    sub(render, "glue", "the glued spine with its junction", cmd_render_glue);
    sub(render, "diagram", "walls of the scattering diagram", cmd_render_diagram);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? Ok : InputError;
    }
    cx.opt = opt;
    bool json_out = opt.json || json_errors;
    try {
        cx.load();
        return run(cx);
    } catch (const Error& e) {
        report_error(e, json_out);
        return e.kind() == ErrorKind::Schema ? InputError : Precondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Precondition;
    }
}
