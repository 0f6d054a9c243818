#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cradon/errors.hpp"
#include "cradon/vec2.hpp"

namespace cradon {

struct CurveSample {
    double s = 0.0;  // arc-length parameter
    Vec2 point;
    Vec2 tangent;    // unit
};

/// A trajectory of circle centers: either an analytic circle (arc-length
/// parametrized, counterclockwise) or a sampled polyline with stored unit
/// tangents. With the orientation convention gamma_dot_perp = (-ty, tx),
/// the "Left" side of a counterclockwise circle is its interior.
class Curve {
public:
    enum class Kind { AnalyticCircle, Sampled };

    static Curve circle(Vec2 center, double radius) {
        if (!(radius > 0.0))
            throw invalid_input_error("Curve: circle radius must be positive");
        Curve c;
        c.kind_ = Kind::AnalyticCircle;
        c.center_ = center;
        c.radius_ = radius;
        c.length_ = 2.0 * M_PI * radius;
        c.closed_ = true;
        return c;
    }

    static Curve sampled(std::vector<CurveSample> samples, bool closed = true) {
        if (samples.size() < 4)
            throw invalid_input_error("Curve: need at least 4 samples");
        Curve c;
        c.kind_ = Kind::Sampled;
        c.samples_ = std::move(samples);
        c.closed_ = closed;
        for (const auto& smp : c.samples_) {
            const double tn = smp.tangent.norm();
            if (std::abs(tn - 1.0) > 1e-6)
                throw invalid_input_error("Curve: tangents must have unit norm");
        }
        c.length_ = c.closed_
                        ? c.samples_.back().s +
                              dist(c.samples_.back().point, c.samples_.front().point)
                        : c.samples_.back().s;
        c.check_simple();
        return c;
    }

    /// Reads the CSV format `s,x,y,tx,ty` (one header line, one row per sample).
    static Curve load_csv(const std::string& path, bool closed = true) {
        std::ifstream in(path);
        if (!in) throw io_error("Curve: cannot open " + path);
        std::string line;
        if (!std::getline(in, line)) throw io_error("Curve: empty file " + path);
        std::vector<CurveSample> samples;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            CurveSample smp;
            char comma;
            ss >> smp.s >> comma >> smp.point.x >> comma >> smp.point.y >> comma >>
                smp.tangent.x >> comma >> smp.tangent.y;
            if (!ss) throw io_error("Curve: malformed row in " + path);
            samples.push_back(smp);
        }
        return sampled(std::move(samples), closed);
    }

    void save_csv(const std::string& path, int n_samples = 0) const {
        std::ofstream out(path);
        if (!out) throw io_error("Curve: cannot write " + path);
        out << "s,x,y,tx,ty\n";
        out.precision(17);
        const int n = (n_samples > 0) ? n_samples
                      : (kind_ == Kind::Sampled ? static_cast<int>(samples_.size())
                                                : 512);
        for (int i = 0; i < n; ++i) {
            const double s = length_ * i / n;
            const Vec2 p = point(s), t = tangent(s);
            out << s << ',' << p.x << ',' << p.y << ',' << t.x << ',' << t.y
                << '\n';
        }
    }

    Kind kind() const { return kind_; }
    bool closed() const { return closed_; }
    double length() const { return length_; }
    Vec2 center() const { return center_; }
    double radius() const { return radius_; }
    const std::vector<CurveSample>& samples() const { return samples_; }

    Vec2 point(double s) const {
        if (kind_ == Kind::AnalyticCircle) {
            const double a = s / radius_;
            return center_ + radius_ * Vec2{std::cos(a), std::sin(a)};
        }
        return sample_interp(s).first;
    }

    Vec2 tangent(double s) const {
        if (kind_ == Kind::AnalyticCircle) {
            const double a = s / radius_;
            return {-std::sin(a), std::cos(a)};
        }
        return sample_interp(s).second;
    }

    /// The normal field fixing the orientation: (-t.y, t.x).
    Vec2 left_normal(double s) const { return tangent(s).perp(); }

    double distance_to(Vec2 x) const {
        if (kind_ == Kind::AnalyticCircle)
            return std::abs(dist(x, center_) - radius_);
        double best = std::numeric_limits<double>::max();
        const std::size_t n = samples_.size();
        const std::size_t nseg = closed_ ? n : n - 1;
        for (std::size_t i = 0; i < nseg; ++i) {
            const Vec2 a = samples_[i].point;
            const Vec2 b = samples_[(i + 1) % n].point;
            const Vec2 ab = b - a;
            double t = (x - a).dot(ab) / ab.norm2();
            t = std::clamp(t, 0.0, 1.0);
            best = std::min(best, dist(x, a + t * ab));
        }
        return best;
    }

    /// True when x lies strictly inside the region bounded by a closed curve.
    bool contains(Vec2 x) const {
        if (!closed_) return false;
        if (kind_ == Kind::AnalyticCircle) return dist(x, center_) < radius_;
        // Winding by ray casting over sample segments.
        int crossings = 0;
        const std::size_t n = samples_.size();
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 a = samples_[i].point, b = samples_[(i + 1) % n].point;
            if ((a.y > x.y) != (b.y > x.y)) {
                const double xi = a.x + (x.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if (xi > x.x) ++crossings;
            }
        }
        return (crossings % 2) == 1;
    }

private:
    std::pair<Vec2, Vec2> sample_interp(double s) const {
        const std::size_t n = samples_.size();
        double sp = s;
        if (closed_) {
            sp = std::fmod(s, length_);
            if (sp < 0) sp += length_;
        } else {
            sp = std::clamp(s, samples_.front().s, samples_.back().s);
        }
        std::size_t lo = 0, hi = n;
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (samples_[mid].s <= sp) lo = mid;
            else hi = mid;
        }
        if (!closed_ && lo + 1 >= n) lo = n - 2;
        const CurveSample& a = samples_[lo];
        const CurveSample& b = samples_[(lo + 1) % n];
        const double sb = (lo + 1 == n) ? length_ : b.s;
        const double u = (sb > a.s) ? (sp - a.s) / (sb - a.s) : 0.0;
        const Vec2 p = (1.0 - u) * a.point + u * b.point;
        Vec2 t = (1.0 - u) * a.tangent + u * b.tangent;
        const double tn = t.norm();
        if (tn > 0) t = t / tn;
        return {p, t};
    }

    void check_simple() const {
        const std::size_t n = samples_.size();
        const std::size_t nseg = closed_ ? n : n - 1;
        for (std::size_t i = 0; i < nseg; ++i) {
            const Vec2 a1 = samples_[i].point;
            const Vec2 a2 = samples_[(i + 1) % n].point;
            for (std::size_t j = i + 2; j < nseg; ++j) {
                if (closed_ && i == 0 && j == nseg - 1) continue;  // shared endpoint
                const Vec2 b1 = samples_[j].point;
                const Vec2 b2 = samples_[(j + 1) % n].point;
                const double d1 = (a2 - a1).cross(b1 - a1);
                const double d2 = (a2 - a1).cross(b2 - a1);
                const double d3 = (b2 - b1).cross(a1 - b1);
                const double d4 = (b2 - b1).cross(a2 - b1);
                if (d1 * d2 < 0 && d3 * d4 < 0)
                    throw invalid_input_error(
                        "Curve: self-intersecting sample polyline");
            }
        }
    }

    Kind kind_ = Kind::AnalyticCircle;
    Vec2 center_;
    double radius_ = 1.0;
    double length_ = 2.0 * M_PI;
    bool closed_ = true;
    std::vector<CurveSample> samples_;
};

/// A point-direction pair (x, xi) in phase space; xi need not be unit but
/// must be nonzero.
struct Covector {
    Vec2 x;
    Vec2 xi;

    Vec2 direction() const {
        const double n = xi.norm();
        if (!(n > 0.0)) throw invalid_input_error("Covector: xi must be nonzero");
        return xi / n;
    }
};

/// One intersection of the line x + t*xi/|xi| with the curve. cos_angle is
/// the cosine of the angle between the line direction and the curve's left
/// normal at the hit; its sign records the crossing side.
struct Hit {
    double t = 0.0;
    double s = 0.0;
    double cos_angle = 0.0;
};

enum class SigmaTag {
    SigmaL_plus,
    SigmaL_minus,
    SigmaR_plus,
    SigmaR_minus,
    tangent,
    multiple,
    no_hit,
};

struct Classification {
    SigmaTag tag = SigmaTag::no_hit;
    std::optional<Hit> hit;  // set for the four Sigma tags
};

inline const char* to_string(SigmaTag tag) {
    switch (tag) {
        case SigmaTag::SigmaL_plus: return "SigmaL_plus";
        case SigmaTag::SigmaL_minus: return "SigmaL_minus";
        case SigmaTag::SigmaR_plus: return "SigmaR_plus";
        case SigmaTag::SigmaR_minus: return "SigmaR_minus";
        case SigmaTag::tangent: return "tangent";
        case SigmaTag::multiple: return "multiple";
        case SigmaTag::no_hit: return "no_hit";
    }
    return "?";
}

/// All hits of the line through cv with the curve for t in [t_range.first,
/// t_range.second], sorted by t.
inline std::vector<Hit> ray_curve_intersections(
    const Curve& curve, const Covector& cv,
    std::pair<double, double> t_range) {
    if (!(t_range.first <= t_range.second) || !std::isfinite(t_range.first) ||
        !std::isfinite(t_range.second))
        throw invalid_input_error("ray_curve_intersections: bad t_range");
    const Vec2 d = cv.direction();
    std::vector<Hit> hits;

    if (curve.kind() == Curve::Kind::AnalyticCircle) {
        const Vec2 w = cv.x - curve.center();
        const double b = d.dot(w);
        const double c = w.norm2() - curve.radius() * curve.radius();
        const double disc = b * b - c;
        if (disc < 0) return hits;
        const double sq = std::sqrt(disc);
        for (double t : {-b - sq, -b + sq}) {
            if (t < t_range.first || t > t_range.second) continue;
            if (sq < 1e-14 && !hits.empty()) break;  // double root, report once
            const Vec2 p = cv.x + t * d;
            const Vec2 rel = p - curve.center();
            double s = std::atan2(rel.y, rel.x);
            if (s < 0) s += 2.0 * M_PI;
            s *= curve.radius();
            Hit h;
            h.t = t;
            h.s = s;
            h.cos_angle = d.dot(curve.left_normal(s));
            hits.push_back(h);
        }
    } else {
        // Bracketing on the signed perpendicular offset of the polyline from
        // the line, refined by bisection in the curve parameter.
        const auto& smp = curve.samples();
        const std::size_t n = smp.size();
        const std::size_t nseg = curve.closed() ? n : n - 1;
        const Vec2 dperp = d.perp();
        auto offset = [&](double s) { return (curve.point(s) - cv.x).dot(dperp); };
        for (std::size_t i = 0; i < nseg; ++i) {
            const double sa = smp[i].s;
            const double sb = (i + 1 == n) ? curve.length() : smp[i + 1].s;
            double fa = offset(sa);
            const double fb = offset(sb);
            // Roots landing exactly on a shared vertex belong to the segment
            // whose head they are.
            if (fb == 0.0) continue;
            if (fa == 0.0) fa = -std::copysign(1e-300, fb);
            if (fa * fb > 0) continue;
            double lo = sa, hi = sb;
            for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (offset(lo) * offset(mid) <= 0) hi = mid;
                else lo = mid;
            }
            const double s = 0.5 * (lo + hi);
            const double t = (curve.point(s) - cv.x).dot(d);
            if (t < t_range.first || t > t_range.second) continue;
            Hit h;
            h.t = t;
            h.s = s;
            h.cos_angle = d.dot(curve.left_normal(s));
            hits.push_back(h);
        }
        std::sort(hits.begin(), hits.end(),
                  [](const Hit& a, const Hit& b) { return a.t < b.t; });
    }
    return hits;
}

struct ClassifyOptions {
    double tangent_tol = 0.05;   // |cos_angle| below this counts as grazing
    double on_curve_tol = 1e-9;  // distance below this counts as on the curve
    std::optional<std::pair<double, double>> t_range;  // default: whole line
};

namespace detail {

inline double line_reach(const Curve& curve, Vec2 x) {
    if (curve.kind() == Curve::Kind::AnalyticCircle)
        return dist(x, curve.center()) + curve.radius() + 1.0;
    double reach = 1.0;
    for (const auto& smp : curve.samples())
        reach = std::max(reach, dist(x, smp.point) + 1.0);
    return reach;
}

} // namespace detail

/// Sigma-decomposition of a covector: exactly one transversal hit lands it
/// in SigmaL/SigmaR (sign of t chooses +/-), any grazing hit is `tangent`,
/// two or more transversal hits are `multiple`.
inline Classification classify_covector(const Curve& curve, const Covector& cv,
                                        const ClassifyOptions& opt = {}) {
    if (curve.distance_to(cv.x) <= opt.on_curve_tol)
        throw on_curve_error("classify_covector: x lies on the curve");
    std::pair<double, double> range;
    if (opt.t_range) {
        range = *opt.t_range;
    } else {
        const double reach = detail::line_reach(curve, cv.x);
        range = {-reach, reach};
    }
    auto hits = ray_curve_intersections(curve, cv, range);
    // Discard the base point itself when the range includes t=0.
    std::erase_if(hits, [&](const Hit& h) {
        return std::abs(h.t) <= opt.on_curve_tol;
    });

    Classification cl;
    if (hits.empty()) {
        cl.tag = SigmaTag::no_hit;
        return cl;
    }
    for (const Hit& h : hits) {
        if (std::abs(h.cos_angle) < opt.tangent_tol) {
            cl.tag = SigmaTag::tangent;
            return cl;
        }
    }
    if (hits.size() > 1) {
        cl.tag = SigmaTag::multiple;
        return cl;
    }
    const Hit& h = hits.front();
    // x is on the Left side iff the crossing moves away from the left normal
    // in forward time (t>0, cos<0) or toward it in backward time (t<0, cos>0).
    const bool left = (h.t > 0) ? (h.cos_angle < 0) : (h.cos_angle > 0);
    const bool plus = h.t > 0;
    cl.tag = left ? (plus ? SigmaTag::SigmaL_plus : SigmaTag::SigmaL_minus)
                  : (plus ? SigmaTag::SigmaR_plus : SigmaTag::SigmaR_minus);
    cl.hit = h;
    return cl;
}

/// Reflection of (x, xi) across the line tangent to the curve at parameter s.
inline Covector mirror_about(const Curve& curve, double s, const Covector& cv) {
    const Vec2 p = curve.point(s);
    const Vec2 u = curve.tangent(s);
    return Covector{p + reflect_across(cv.x - p, u), reflect_across(cv.xi, u)};
}

/// The mirror map: reflection of (x, xi) across the tangent line of the
/// curve at the unique transversal hit of the line through (x, xi). Unless
/// the caller supplies a t_range, the hit is sought along the forward ray,
/// so the map is well defined on closed curves too.
inline Covector mirror(const Curve& curve, const Covector& cv,
                       ClassifyOptions opt = {}) {
    if (!opt.t_range)
        opt.t_range = {opt.on_curve_tol, detail::line_reach(curve, cv.x)};
    const Classification cl = classify_covector(curve, cv, opt);
    if (!cl.hit)
        throw not_mirrorable_error(
            std::string("mirror: covector classifies as ") + to_string(cl.tag));
    return mirror_about(curve, cl.hit->s, cv);
}

namespace detail {

struct BilliardState {
    Vec2 pos;
    Vec2 dir;  // unit
    double time_abs = 0.0;
};

// First intersection of the ray pos + u*dir (u > eps) with the curve.
// Returns the travel distance and the curve parameter.
inline std::optional<std::pair<double, double>> next_boundary_hit(
    const Curve& curve, Vec2 pos, Vec2 dir) {
    const double eps = 1e-10;
    auto hits = ray_curve_intersections(
        curve, Covector{pos, dir},
        {eps, std::numeric_limits<double>::max() / 2});
    if (hits.empty()) return std::nullopt;
    return std::make_pair(hits.front().t, hits.front().s);
}

} // namespace detail

/// Billiard flow in the strictly convex domain bounded by a closed curve:
/// unit-speed travel along xi/|xi| with specular reflection at the boundary.
/// At exact reflection times the pre-reflection state is returned (limit from
/// the left in time). Works for t of either sign.
inline Covector billiard_flow(const Curve& curve, const Covector& cv, double t,
                              double tangent_tol = 1e-9) {
    if (!curve.closed())
        throw invalid_input_error("billiard_flow: curve must be closed");
    if (!curve.contains(cv.x))
        throw invalid_input_error("billiard_flow: x must lie inside the domain");
    const double xi_norm = cv.xi.norm();
    const bool backward = t < 0;
    Vec2 pos = cv.x;
    Vec2 dir = backward ? -cv.direction() : cv.direction();
    double remaining = std::abs(t);
    const double hit_eps = 1e-12 * (1.0 + std::abs(t));

    while (true) {
        auto hit = detail::next_boundary_hit(curve, pos, dir);
        if (!hit)
            throw numerics_error("billiard_flow: lost the boundary");
        const auto [u, s] = *hit;
        if (u >= remaining - hit_eps) {
            const bool lands_on_boundary = u <= remaining + hit_eps;
            pos = pos + std::min(u, remaining) * dir;
            if (lands_on_boundary && backward) {
                // Forward-time limit from the left at a reflection instant:
                // the incoming segment is the one reached by continuing
                // backward through the reflection.
                const Vec2 nrm = curve.left_normal(s);
                dir = dir - 2.0 * dir.dot(nrm) * nrm;
            }
            const Vec2 fwd = backward ? -dir : dir;
            return Covector{pos, xi_norm * fwd};
        }
        pos = curve.point(s);
        remaining -= u;
        const Vec2 nrm = curve.left_normal(s);
        const double ca = dir.dot(nrm);
        if (std::abs(ca) < tangent_tol)
            throw tangency_error("billiard_flow: tangential grazing");
        dir = dir - 2.0 * ca * nrm;
    }
}

/// One record per billiard segment: the unrolled covector
/// Phi^{-t} o Phi_gamma^t (constant between reflections), the segment index
/// (0 = segment containing t=0, positive forward, negative backward) and the
/// billiard time at which the segment begins, walking outward from t=0.
struct ArtifactRecord {
    Covector cv;
    int segment_index = 0;
    double reflection_time = 0.0;
};

struct ArtifactChain {
    std::vector<ArtifactRecord> records;  // ordered by segment_index
};

/// All mirror points of (x, xi) reachable within |t| <= t_max: the billiard
/// trajectory unrolled back along straight lines, one covector per segment.
inline ArtifactChain artifact_set(const Curve& curve, const Covector& cv,
                                  double t_max) {
    if (!(t_max > 0)) throw invalid_input_error("artifact_set: t_max must be > 0");
    if (!curve.contains(cv.x))
        throw invalid_input_error("artifact_set: x must lie inside the domain");
    const double xi_norm = cv.xi.norm();

    ArtifactChain chain;
    chain.records.push_back({cv, 0, 0.0});

    // Walk forward: track reflection times and unroll one representative
    // per segment.
    for (int sign : {+1, -1}) {
        Vec2 pos = cv.x;
        Vec2 dir = (sign > 0) ? cv.direction() : -cv.direction();
        double elapsed = 0.0;
        int index = 0;
        while (true) {
            auto hit = detail::next_boundary_hit(curve, pos, dir);
            if (!hit) throw numerics_error("artifact_set: lost the boundary");
            const auto [u, s] = *hit;
            if (elapsed + u >= t_max) break;
            elapsed += u;
            index += sign;
            pos = curve.point(s);
            const Vec2 nrm = curve.left_normal(s);
            dir = dir - 2.0 * dir.dot(nrm) * nrm;
            // Representative at the reflection instant (segment start): the
            // unrolled covector is constant on the whole segment.
            const Vec2 fwd = (sign > 0) ? dir : -dir;
            const double t_signed = sign * elapsed;
            ArtifactRecord rec;
            rec.cv = Covector{pos - t_signed * fwd, xi_norm * fwd};
            rec.segment_index = index;
            rec.reflection_time = t_signed;
            if (sign > 0) chain.records.push_back(rec);
            else chain.records.insert(chain.records.begin(), rec);
        }
    }
    return chain;
}

} // namespace cradon
