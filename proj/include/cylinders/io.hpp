#pragma once

// JSON forms of the core values. Rationals are {"num": "...", "den": "..."}
// with decimal strings; cones, rays, vertices and edges are 1-based in files.
// Every reader reports schema problems with a JSON pointer to the field.

#include "cylinders/tropical.hpp"
#include "cylinders/verify.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace cylinders::io {

using json = nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& ptr, const std::string& what)
{
    throw Error(ErrorKind::Schema, (ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

inline const json& field(const json& j, const std::string& key, const std::string& ptr)
{
    if (!j.is_object())
        schema_error(ptr, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        schema_error(ptr + "/" + key, "missing");
    return *it;
}

inline const json& element(const json& j, std::size_t i, const std::string& ptr)
{
    if (!j.is_array() || i >= j.size())
        schema_error(ptr, "expected an array with at least " + std::to_string(i + 1) + " entries");
    return j[i];
}

inline void require_array(const json& j, const std::string& ptr, std::optional<std::size_t> size = std::nullopt)
{
    if (!j.is_array())
        schema_error(ptr, "expected an array");
    if (size && j.size() != *size)
        schema_error(ptr, "expected " + std::to_string(*size) + " entries");
}

// ---------------------------------------------------------------- numbers

inline json to_json(const Integer& n)
{
    if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
        return static_cast<long long>(n);
    return n.str();
}

inline Integer integer_from(const json& j, const std::string& ptr)
{
    if (j.is_number_integer())
        return Integer(j.get<long long>());
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string::npos)
            schema_error(ptr, "'" + s + "' is not an integer");
        return Integer(s);
    }
    schema_error(ptr, "expected an integer");
}

inline json to_json(const Rational& r)
{
    return json{{"num", numerator(r).str()}, {"den", denominator(r).str()}};
}

inline Rational rational_from(const json& j, const std::string& ptr)
{
    if (j.is_number_integer() || j.is_string())
        return Rational(integer_from(j, ptr));
    if (!j.is_object())
        schema_error(ptr, "expected {\"num\": ..., \"den\": ...}");
    Integer num = integer_from(field(j, "num", ptr), ptr + "/num");
    Integer den = integer_from(field(j, "den", ptr), ptr + "/den");
    if (den == 0)
        schema_error(ptr + "/den", "zero denominator");
    return Rational(num, den);
}

inline int int_from(const json& j, const std::string& ptr)
{
    if (!j.is_number_integer())
        schema_error(ptr, "expected an integer");
    long long v = j.get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        schema_error(ptr, "out of range");
    return static_cast<int>(v);
}

inline std::string string_from(const json& j, const std::string& ptr)
{
    if (!j.is_string())
        schema_error(ptr, "expected a string");
    return j.get<std::string>();
}

inline json to_json(const IntVec& v) { return json::array({to_json(v.x), to_json(v.y)}); }

inline IntVec intvec_from(const json& j, const std::string& ptr)
{
    require_array(j, ptr, 2);
    return {integer_from(j[0], ptr + "/0"), integer_from(j[1], ptr + "/1")};
}

inline json to_json(const RatVec& v) { return json::array({to_json(v.x), to_json(v.y)}); }

inline RatVec ratvec_from(const json& j, const std::string& ptr)
{
    require_array(j, ptr, 2);
    return {rational_from(j[0], ptr + "/0"), rational_from(j[1], ptr + "/1")};
}

inline json to_json(const UniMatrix& m)
{
    return json::array({json::array({to_json(m.a()), to_json(m.b())}), json::array({to_json(m.c()), to_json(m.d())})});
}

// ---------------------------------------------------------------- base

inline json to_json(const BasePoint& p) { return json{{"cone", p.cone + 1}, {"coords", to_json(p.coords)}}; }

inline BasePoint point_from(const json& j, const std::string& ptr, std::optional<int> l = std::nullopt)
{
    int cone = int_from(field(j, "cone", ptr), ptr + "/cone");
    if (cone < 1 || (l && cone > *l))
        schema_error(ptr + "/cone", "cone " + std::to_string(cone) + " out of range");
    RatVec c = ratvec_from(field(j, "coords", ptr), ptr + "/coords");
    if (c.x < 0 || c.y < 0)
        schema_error(ptr + "/coords", "coordinates must be nonnegative");
    return {cone - 1, c};
}

inline json to_json(const LooijengaData& d)
{
    json seeds = json::array();
    for (const auto& s : d.seeds)
        seeds.push_back({{"ray", s.ray + 1}, {"name", s.name}});
    return json{{"l", d.l()}, {"d", d.d}, {"seeds", seeds}};
}

inline LooijengaData pair_from(const json& j, const std::string& ptr = "")
{
    LooijengaData out;
    int l = int_from(field(j, "l", ptr), ptr + "/l");
    const json& d = field(j, "d", ptr);
    require_array(d, ptr + "/d");
    for (std::size_t i = 0; i < d.size(); ++i)
        out.d.push_back(int_from(d[i], ptr + "/d/" + std::to_string(i)));
    if (static_cast<int>(out.d.size()) != l)
        schema_error(ptr + "/d", "has " + std::to_string(out.d.size()) + " entries but l = " + std::to_string(l));
    if (l < 3)
        schema_error(ptr + "/l", "need l >= 3");
    if (j.contains("seeds")) {
        const json& s = j.at("seeds");
        require_array(s, ptr + "/seeds");
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::string p = ptr + "/seeds/" + std::to_string(i);
            int ray = int_from(field(s[i], "ray", p), p + "/ray");
            if (ray < 1 || ray > l)
                schema_error(p + "/ray", "ray " + std::to_string(ray) + " out of range");
            std::string name = string_from(field(s[i], "name", p), p + "/name");
            if (name.empty() || name.find_first_of(" ^*+,") != std::string::npos || name == "0")
                schema_error(p + "/name", "'" + name + "' is not a usable generator name");
            out.seeds.push_back({ray - 1, name});
        }
    }
    return out;
}

// ---------------------------------------------------------------- spines

inline json to_json(const Spine& s)
{
    json v = json::array(), e = json::array();
    for (const auto& p : s.vertices)
        v.push_back(to_json(p));
    for (const auto& x : s.edges)
        e.push_back({{"dir", to_json(x.dir)}, {"speed", to_json(Rational(x.speed))}});
    return json{{"vertices", v}, {"edges", e}, {"endpoints", json::array({1, static_cast<int>(s.vertices.size())})}};
}

inline Spine spine_from(const json& j, const std::string& ptr = "", std::optional<int> l = std::nullopt)
{
    Spine s;
    const json& v = field(j, "vertices", ptr);
    const json& e = field(j, "edges", ptr);
    require_array(v, ptr + "/vertices");
    require_array(e, ptr + "/edges");
    for (std::size_t i = 0; i < v.size(); ++i)
        s.vertices.push_back(point_from(v[i], ptr + "/vertices/" + std::to_string(i), l));
    for (std::size_t i = 0; i < e.size(); ++i) {
        std::string p = ptr + "/edges/" + std::to_string(i);
        IntVec dir = intvec_from(field(e[i], "dir", p), p + "/dir");
        Rational speed = e[i].contains("speed") ? rational_from(e[i].at("speed"), p + "/speed") : Rational(1);
        if (!is_integral(speed) || speed <= 0)
            schema_error(p + "/speed", "speed must be a positive integer");
        s.edges.push_back({dir, numerator(speed)});
    }
    if (s.vertices.size() < 2 || s.edges.size() + 1 != s.vertices.size())
        schema_error(ptr + "/edges", "a chain needs one edge fewer than vertices and at least one edge");
    if (j.contains("endpoints")) {
        const json& ep = j.at("endpoints");
        require_array(ep, ptr + "/endpoints", 2);
        if (int_from(ep[0], ptr + "/endpoints/0") != 1 ||
            int_from(ep[1], ptr + "/endpoints/1") != static_cast<int>(s.vertices.size()))
            schema_error(ptr + "/endpoints", "endpoints must be the first and last vertex");
    }
    return s;
}

inline json to_json(const std::vector<SpineViolation>& vs)
{
    json out = json::array();
    for (const auto& v : vs)
        out.push_back({{"condition", v.condition}, {"index", v.index + 1}, {"detail", v.detail}});
    return out;
}

inline json to_json(const Continuation& c)
{
    json poly = json::array();
    for (const auto& p : c.polyline)
        poly.push_back(to_json(p));
    return json{{"polyline", poly},
                {"outcome", to_string(c.outcome)},
                {"final_cone", c.final_cone + 1},
                {"final_dir", to_json(c.final_dir)}};
}

inline json to_json(const ExtendResult& r)
{
    if (!r.extendable())
        return json{{"extendable", false}, {"end", r.failed_end}, {"outcome", to_string(r.failed.outcome)},
                    {"continuation", to_json(r.failed)}};
    const ExtendedSpine& e = *r.spine;
    return json{{"extendable", true},
                {"core", to_json(e.core)},
                {"ends", json::array({{{"continuation", to_json(e.end1)},
                                       {"speed", to_json(e.speed1)},
                                       {"asymptotic", to_json(e.asymptotic1())}},
                                      {{"continuation", to_json(e.end2)},
                                       {"speed", to_json(e.speed2)},
                                       {"asymptotic", to_json(e.asymptotic2())}}})}};
}

// ---------------------------------------------------------------- classes, diagrams

inline json to_json(const CurveClass& c) { return c.str(); }

inline CurveClass class_from(const json& j, const std::string& ptr)
{
    try {
        return CurveClass::parse(string_from(j, ptr));
    } catch (const Error& e) {
        schema_error(ptr, e.what());
    }
}

inline json to_json(const Counts& c)
{
    json out = json::array();
    for (const auto& [cls, n] : c)
        out.push_back({{"class", cls.str()}, {"count", n.str()}});
    return out;
}

inline Counts counts_from(const json& j, const std::string& ptr)
{
    require_array(j, ptr);
    Counts out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string p = ptr + "/" + std::to_string(i);
        out[class_from(field(j[i], "class", p), p + "/class")] = integer_from(field(j[i], "count", p), p + "/count");
    }
    return out;
}

inline json to_json(const ScatteringDiagram& d)
{
    json walls = json::array();
    for (const auto& w : d.walls) {
        json terms = json::array();
        for (const auto& t : w.terms)
            terms.push_back({{"k", t.k}, {"class", t.cls.str()}, {"coeff", t.coeff.str()}});
        walls.push_back({{"dir", to_json(w.dir)}, {"line", w.line}, {"terms", terms}});
    }
    return json{{"order", d.order}, {"walls", walls}};
}

inline ScatteringDiagram diagram_from(const json& j, const std::string& ptr = "")
{
    ScatteringDiagram d;
    d.order = int_from(field(j, "order", ptr), ptr + "/order");
    const json& ws = field(j, "walls", ptr);
    require_array(ws, ptr + "/walls");
    for (std::size_t i = 0; i < ws.size(); ++i) {
        std::string p = ptr + "/walls/" + std::to_string(i);
        Wall w;
        w.dir = point_from(field(ws[i], "dir", p), p + "/dir");
        const json& line = field(ws[i], "line", p);
        if (!line.is_boolean())
            schema_error(p + "/line", "expected a boolean");
        w.line = line.get<bool>();
        const json& ts = field(ws[i], "terms", p);
        require_array(ts, p + "/terms");
        for (std::size_t k = 0; k < ts.size(); ++k) {
            std::string q = p + "/terms/" + std::to_string(k);
            w.terms.push_back({int_from(field(ts[k], "k", q), q + "/k"), class_from(field(ts[k], "class", q), q + "/class"),
                               integer_from(field(ts[k], "coeff", q), q + "/coeff")});
        }
        d.walls.push_back(std::move(w));
    }
    return d;
}

inline json to_json(const Monomial& m)
{
    return json{{"coeff", m.coeff.str()}, {"class", m.cls.str()}, {"q", to_json(m.q)}};
}

inline json to_json(const BrokenLine& g)
{
    json bends = json::array();
    for (const auto& b : g.bends)
        bends.push_back({{"at", to_json(b.at)},
                         {"wall", to_json(b.wall)},
                         {"q_before", to_json(b.q_before)},
                         {"q_after", to_json(b.q_after)},
                         {"k", b.k},
                         {"class", b.cls.str()},
                         {"coeff", b.coeff.str()}});
    return json{{"asymptotic", to_json(g.asymptotic)}, {"endpoint", to_json(g.endpoint)}, {"bends", bends},
                {"final", to_json(g.final)}};
}

// ---------------------------------------------------------------- B_f and tropical curves

inline json to_json(const BfRegion& bf)
{
    json cut = json::array(), strips = json::array();
    for (const auto& r : bf.cutoff)
        cut.push_back(to_json(r));
    for (const auto& cone : bf.strips) {
        json list = json::array();
        for (const auto& s : cone)
            list.push_back({{"dir", to_json(s.dir)}, {"t0", to_json(s.t0)}, {"t1", to_json(s.t1)}});
        strips.push_back(list);
    }
    return json{{"cutoffs", cut}, {"strips", strips}};
}

inline BfRegion bf_from(const json& j, const std::string& ptr = "")
{
    BfRegion bf;
    const json& cut = field(j, "cutoffs", ptr);
    require_array(cut, ptr + "/cutoffs");
    for (std::size_t i = 0; i < cut.size(); ++i)
        bf.cutoff.push_back(rational_from(cut[i], ptr + "/cutoffs/" + std::to_string(i)));
    bf.strips.assign(bf.cutoff.size(), {});
    if (j.contains("strips")) {
        const json& st = j.at("strips");
        require_array(st, ptr + "/strips", bf.cutoff.size());
        for (std::size_t c = 0; c < st.size(); ++c) {
            require_array(st[c], ptr + "/strips/" + std::to_string(c));
            for (std::size_t k = 0; k < st[c].size(); ++k) {
                std::string p = ptr + "/strips/" + std::to_string(c) + "/" + std::to_string(k);
                bf.strips[c].push_back({intvec_from(field(st[c][k], "dir", p), p + "/dir"),
                                        rational_from(field(st[c][k], "t0", p), p + "/t0"),
                                        rational_from(field(st[c][k], "t1", p), p + "/t1")});
            }
        }
    }
    return bf;
}

inline json to_json(const TropCurve& c)
{
    json v = json::array(), e = json::array(), l = json::array(), m = json::array();
    for (const auto& p : c.vertices)
        v.push_back(to_json(p));
    for (const auto& x : c.edges)
        e.push_back({{"tail", x.tail + 1}, {"head", x.head + 1}, {"dir", to_json(x.dir)}, {"speed", to_json(x.speed)}});
    for (const auto& x : c.legs)
        l.push_back({{"at", x.at + 1}, {"dir", to_json(x.dir)}, {"speed", to_json(x.speed)}});
    for (int k : c.marks)
        m.push_back(k + 1);
    return json{{"vertices", v}, {"edges", e}, {"legs", l}, {"marks", m}};
}

inline TropCurve trop_curve_from(const json& j, const std::string& ptr = "")
{
    TropCurve c;
    const json& v = field(j, "vertices", ptr);
    require_array(v, ptr + "/vertices");
    for (std::size_t i = 0; i < v.size(); ++i)
        c.vertices.push_back(point_from(v[i], ptr + "/vertices/" + std::to_string(i)));
    int n = static_cast<int>(c.vertices.size());
    auto vertex = [&](const json& x, const std::string& p) {
        int k = int_from(x, p);
        if (k < 1 || k > n)
            schema_error(p, "vertex " + std::to_string(k) + " out of range");
        return k - 1;
    };
    const json& e = field(j, "edges", ptr);
    require_array(e, ptr + "/edges");
    for (std::size_t i = 0; i < e.size(); ++i) {
        std::string p = ptr + "/edges/" + std::to_string(i);
        c.edges.push_back({vertex(field(e[i], "tail", p), p + "/tail"), vertex(field(e[i], "head", p), p + "/head"),
                           intvec_from(field(e[i], "dir", p), p + "/dir"),
                           integer_from(field(e[i], "speed", p), p + "/speed")});
    }
    if (j.contains("legs")) {
        const json& l = j.at("legs");
        require_array(l, ptr + "/legs");
        for (std::size_t i = 0; i < l.size(); ++i) {
            std::string p = ptr + "/legs/" + std::to_string(i);
            c.legs.push_back({vertex(field(l[i], "at", p), p + "/at"), intvec_from(field(l[i], "dir", p), p + "/dir"),
                              integer_from(field(l[i], "speed", p), p + "/speed")});
        }
    }
    const json& m = field(j, "marks", ptr);
    require_array(m, ptr + "/marks");
    for (std::size_t i = 0; i < m.size(); ++i)
        c.marks.push_back(vertex(m[i], ptr + "/marks/" + std::to_string(i)));
    if (c.marks.empty())
        schema_error(ptr + "/marks", "at least one mark");
    return c;
}

// ---------------------------------------------------------------- reports

inline json to_json(const GluingReport& r)
{
    json rows = json::array();
    for (const auto& x : r.rows)
        rows.push_back({{"class", x.cls.str()},
                        {"n1", x.n1.str()},
                        {"n2", x.n2.str()},
                        {"convolution", x.convolution.str()},
                        {"direct", x.direct.str()},
                        {"pass", x.pass}});
    json out{{"bound", r.bound}, {"rows", rows}, {"pass", r.pass}};
    if (r.precondition)
        out["precondition"] = {{"error", to_string(r.precondition->kind)}, {"message", r.precondition->message}};
    return out;
}

inline json to_json(const PositivityReport& r)
{
    json f = json::array();
    for (const auto& x : r.failures)
        f.push_back({{"spine", x.spine + 1}, {"class", x.cls.str()}, {"value", x.value.str()}, {"reason", x.reason}});
    return json{{"bound", r.bound},       {"spines", r.spines}, {"counts", r.counts},
                {"largest", r.largest.str()}, {"failures", f},      {"pass", r.pass()}};
}

inline json to_json(const SymmetryReport& r)
{
    json probes = json::array();
    for (const auto& p : r.probes)
        probes.push_back({{"at", to_json(p.at)}, {"counts", to_json(p.counts)}, {"pass", p.pass}});
    return json{{"bound", r.bound}, {"reference", to_json(r.reference)}, {"probes", probes}, {"pass", r.pass}};
}

inline json to_json(const StraightReport& r)
{
    return json{{"bound", r.bound}, {"counts", to_json(r.counts)}, {"pass", r.pass}};
}

inline json to_json(const ConsistencyReport& r)
{
    json out{{"ok", r.ok}, {"joint", r.joint}};
    if (!r.ok)
        out["discrepancy"] = {{"degree", r.degree},
                              {"class", r.cls.str()},
                              {"exponent", to_json(r.exponent)},
                              {"dx", r.dx.str()},
                              {"dy", r.dy.str()}};
    return out;
}

inline json to_json(const SubdivisionReport& r)
{
    return json{{"contained", r.contained},
                {"parallel_ends", r.parallel_ends},
                {"projection", r.projection},
                {"problems", r.problems},
                {"pass", r.pass()}};
}

inline json to_json(const RigidityReport& r)
{
    return json{{"unknowns", r.unknowns},   {"deformations", r.deformations}, {"path_moves", r.path_moves},
                {"trials", r.trials},       {"trials_moved", r.trials_moved}, {"rigid", r.rigid()}};
}

inline json to_json(const TwigResult& r)
{
    json out{{"ok", r.ok}};
    if (r.ok)
        out["ray"] = to_json(r.ray);
    else
        out["violation"] = {{"witness", r.witness + 1}, {"reason", r.reason}};
    return out;
}

// ---------------------------------------------------------------- corpora

/// A pair with gluable spine pairs and straight spines, all in one file.
struct SpineCorpus {
    std::optional<LooijengaData> pair;
    std::vector<std::pair<Spine, Spine>> pairs;
    std::vector<Spine> straight;
};

inline SpineCorpus corpus_from(const json& j, std::optional<int> l = std::nullopt)
{
    SpineCorpus c;
    if (!j.is_object())
        schema_error("", "expected an object");
    if (j.contains("pair")) {
        c.pair = pair_from(j.at("pair"), "/pair");
        l = c.pair->l();
    }
    if (j.contains("pairs")) {
        const json& ps = j.at("pairs");
        require_array(ps, "/pairs");
        for (std::size_t i = 0; i < ps.size(); ++i) {
            std::string p = "/pairs/" + std::to_string(i);
            c.pairs.emplace_back(spine_from(field(ps[i], "l1", p), p + "/l1", l),
                                 spine_from(field(ps[i], "l2", p), p + "/l2", l));
        }
    }
    if (j.contains("straight")) {
        const json& ss = j.at("straight");
        require_array(ss, "/straight");
        for (std::size_t i = 0; i < ss.size(); ++i)
            c.straight.push_back(spine_from(ss[i], "/straight/" + std::to_string(i), l));
    }
    return c;
}

inline json to_json(const SpineCorpus& c)
{
    json pairs = json::array(), straight = json::array();
    for (const auto& [a, b] : c.pairs)
        pairs.push_back({{"l1", to_json(a)}, {"l2", to_json(b)}});
    for (const auto& s : c.straight)
        straight.push_back(to_json(s));
    json out{{"pairs", pairs}, {"straight", straight}};
    if (c.pair)
        out["pair"] = to_json(*c.pair);
    return out;
}

// ---------------------------------------------------------------- files

inline json parse_text(const std::string& text, const std::string& name)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Schema, name + ": " + e.what());
    }
}

inline json read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Schema, path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

/// Stable textual form: sorted keys, two-space indent, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Schema, path + ": cannot write");
    out << text;
}

} // namespace cylinders::io
