#pragma once

// Verifiers for the cylinder-count identities: gluing, positivity and
// integrality, symmetry under moving the endpoint constraint, and the
// normalization of straight spines.

#include "cylinders/broken_lines.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace cylinders {

using Counts = std::map<CurveClass, Integer>;

inline Integer count_at(const Counts& c, const CurveClass& beta)
{
    auto it = c.find(beta);
    return it == c.end() ? Integer(0) : it->second;
}

/// sum over b1 + b2 = beta of a(b1) * b(b2), truncated at degree `bound`.
inline Counts convolve(const Counts& a, const Counts& b, int bound)
{
    Counts out;
    for (const auto& [c1, n1] : a)
        for (const auto& [c2, n2] : b) {
            CurveClass c = c1 + c2;
            if (c.degree() <= bound)
                out[c] += n1 * n2;
        }
    for (auto it = out.begin(); it != out.end();)
        it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

inline std::vector<std::string> seed_names(const Base& base)
{
    std::vector<std::string> names;
    for (const auto& s : base.data().seeds)
        if (std::find(names.begin(), names.end(), s.name) == names.end())
            names.push_back(s.name);
    return names;
}

struct PreconditionFailure {
    ErrorKind kind;
    std::string message;
};

struct GluingRow {
    CurveClass cls;
    Integer n1{0}, n2{0}, convolution{0}, direct{0};
    bool pass = true;
};

struct GluingReport {
    int bound = 0;
    std::vector<GluingRow> rows;
    std::optional<PreconditionFailure> precondition;
    bool pass = false;
    double seconds = 0;
};

/// Both sides of the gluing formula from three separate trace runs. A
/// separate diagram for the glued spine is only used to plant faults.
inline GluingReport verify_gluing(const Base& base, const ScatteringDiagram& d, const Spine& L1, const Spine& L2,
                                  int bound, const ScatteringDiagram* direct_diagram = nullptr)
{
    auto t0 = std::chrono::steady_clock::now();
    GluingReport r;
    r.bound = bound;
    Spine L3;
    try {
        L3 = glue_spines(base, L1, L2);
    } catch (const Error& e) {
        r.precondition = PreconditionFailure{e.kind(), e.what()};
        return r;
    }
    Counts c1 = cylinder_counts(base, d, L1, bound);
    Counts c2 = cylinder_counts(base, d, L2, bound);
    Counts c3 = cylinder_counts(base, direct_diagram ? *direct_diagram : d, L3, bound);
    Counts conv = convolve(c1, c2, bound);
    r.pass = true;
    for (const auto& cls : classes_up_to(seed_names(base), bound)) {
        GluingRow row{cls, count_at(c1, cls), count_at(c2, cls), count_at(conv, cls), count_at(c3, cls)};
        row.pass = row.convolution == row.direct;
        r.pass = r.pass && row.pass;
        r.rows.push_back(row);
    }
    // classes outside the generators would be a bug in the tracer
    for (const auto* c : {&c1, &c2, &c3})
        for (const auto& [cls, n] : *c)
            if (cls.degree() > bound)
                r.pass = false;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

struct CountFailure {
    std::size_t spine = 0;
    CurveClass cls;
    Integer value{0};
    std::string reason;
};

struct PositivityReport {
    int bound = 0;
    std::size_t spines = 0;
    std::size_t counts = 0;    // nonzero counts inspected
    Integer largest{0};
    std::vector<CountFailure> failures;
    bool pass() const { return failures.empty(); }
};

/// Every count must be a nonnegative integer; integrality holds by
/// construction, so only the sign is checked.
inline PositivityReport verify_positivity_integrality(const Base& base, const ScatteringDiagram& d,
                                                      const std::vector<Spine>& spines, int bound)
{
    PositivityReport r;
    r.bound = bound;
    for (std::size_t i = 0; i < spines.size(); ++i) {
        Counts c = cylinder_counts(base, d, spines[i], bound);
        ++r.spines;
        for (const auto& [cls, n] : c) {
            ++r.counts;
            if (n > r.largest)
                r.largest = n;
            if (n < 0)
                r.failures.push_back({i, cls, n, "negative"});
            if (cls.degree() > bound)
                r.failures.push_back({i, cls, n, "class beyond the bound"});
        }
    }
    return r;
}

struct ProbeResult {
    BasePoint at;
    Counts counts;
    bool pass = true;
};

struct SymmetryReport {
    int bound = 0;
    Counts reference;
    std::vector<ProbeResult> probes;
    bool pass = true;
};

/// The extension of L truncated far enough out to contain every probe.
inline Spine extension_through(const Base& base, const Spine& L, const std::vector<BasePoint>& probes)
{
    ExtendResult e = extend_spine(base, L);
    if (!e.extendable())
        throw Error(ErrorKind::NotExtendableSpine, "spine end " + std::to_string(e.failed_end) + " does not escape");
    for (Rational len = 1; len <= 1024; len *= 2) {
        Spine t = truncate_extension(base, *e.spine, len);
        bool all = true;
        for (const auto& p : probes) {
            auto loc = locate_on_spine(base, t, p);
            if (!loc || (loc->at_vertex && (loc->index == 0 || loc->index + 1 == t.vertices.size()))) {
                all = false;
                break;
            }
        }
        if (all)
            return t;
    }
    throw Error(ErrorKind::InvalidData, "a probe point is not on the extended spine");
}

/// Counts with the endpoint constraint at r: the two halves of the extended
/// spine at r, each traced from its own unbounded end.
inline Counts counts_at_probe(const Base& base, const ScatteringDiagram& d, const Spine& extended, const BasePoint& r,
                              int bound)
{
    auto [a, b] = split_spine(base, extended, r);
    return convolve(cylinder_counts(base, d, a, bound), cylinder_counts(base, d, reversed(base, b), bound), bound);
}

inline SymmetryReport verify_symmetry(const Base& base, const ScatteringDiagram& d, const Spine& L,
                                      const std::vector<BasePoint>& probes, int bound)
{
    SymmetryReport r;
    r.bound = bound;
    r.reference = cylinder_counts(base, d, L, bound);
    Spine t = extension_through(base, L, probes);
    for (const auto& p : probes) {
        ProbeResult pr{base.canonical(p), counts_at_probe(base, d, t, p, bound), true};
        pr.pass = pr.counts == r.reference;
        r.pass = r.pass && pr.pass;
        r.probes.push_back(std::move(pr));
    }
    return r;
}

/// Probe points spread over the extended spine, off walls and off bends.
inline std::vector<BasePoint> sample_probes(const Base& base, const ScatteringDiagram& d, const Spine& L, int n)
{
    ExtendResult e = extend_spine(base, L);
    if (!e.extendable())
        throw Error(ErrorKind::NotExtendableSpine, "spine end " + std::to_string(e.failed_end) + " does not escape");
    Spine t = truncate_extension(base, *e.spine, 2);
    WallIndex idx(base, d, std::max(d.order, 1));
    std::vector<BasePoint> out;
    const Rational fracs[] = {Rational(1, 2), Rational(1, 3), Rational(2, 3), Rational(1, 7), Rational(5, 7),
                              Rational(3, 11), Rational(8, 11), Rational(5, 13)};
    for (const Rational& f : fracs)
        for (std::size_t k = 0; k < t.edges.size() && static_cast<int>(out.size()) < n; ++k) {
            BasePoint p = point_on_edge(base, t, k, f);
            if (idx.containing(p) || std::find(out.begin(), out.end(), p) != out.end())
                continue;
            out.push_back(p);
        }
    return out;
}

struct StraightReport {
    int bound = 0;
    Counts counts;
    bool pass = false;
};

inline StraightReport verify_straight_spine(const Base& base, const ScatteringDiagram& d, const Spine& L, int bound)
{
    require_valid(base, L);
    if (!is_straight(base, L))
        throw Error(ErrorKind::NotStraight, "the spine bends");
    StraightReport r;
    r.bound = bound;
    r.counts = cylinder_counts(base, d, L, bound);
    r.pass = r.counts.size() == 1 && r.counts.begin()->second == 1;
    return r;
}

} // namespace cylinders
