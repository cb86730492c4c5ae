#include "wdr/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wdr/rng.hpp"

namespace wdr {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

int convex_dim(const ConvexVariant& v) {
    if (const auto* b = std::get_if<BoxPrim>(&v)) return static_cast<int>(b->lo.size());
    if (const auto* b = std::get_if<BallPrim>(&v)) return static_cast<int>(b->center.size());
    if (std::get_if<PolygonPrim>(&v)) return 2;
    return static_cast<int>(std::get<HalfSpacePrim>(v).normal.size());
}

int prim_dim(const PrimVariant& v) {
    if (const auto* c = std::get_if<ComplementPrim>(&v)) return convex_dim(c->inner);
    if (const auto* b = std::get_if<BoxPrim>(&v)) return static_cast<int>(b->lo.size());
    if (const auto* b = std::get_if<BallPrim>(&v)) return static_cast<int>(b->center.size());
    if (std::get_if<PolygonPrim>(&v)) return 2;
    return static_cast<int>(std::get<HalfSpacePrim>(v).normal.size());
}

double seg_dist(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - a - t * ab).norm();
}

bool polygon_contains(const PolygonPrim& poly, const Eigen::Vector2d& p) {
    const std::size_t n = poly.verts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d& a = poly.verts[i];
        const Eigen::Vector2d& b = poly.verts[(i + 1) % n];
        const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
        if (cross < 0.0) return false;  // CCW polygon: inside means left of every edge
    }
    return true;
}

double convex_outside_dist(const ConvexVariant& v, const Eigen::VectorXd& x) {
    if (const auto* b = std::get_if<BoxPrim>(&v)) {
        const Eigen::VectorXd gap =
            (b->lo - x).cwiseMax(x - b->hi).cwiseMax(Eigen::VectorXd::Zero(x.size()).eval());
        return gap.norm();
    }
    if (const auto* b = std::get_if<BallPrim>(&v)) {
        return std::max((x - b->center).norm() - b->radius, 0.0);
    }
    if (const auto* poly = std::get_if<PolygonPrim>(&v)) {
        const Eigen::Vector2d p(x(0), x(1));
        if (polygon_contains(*poly, p)) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        const std::size_t n = poly->verts.size();
        for (std::size_t i = 0; i < n; ++i)
            best = std::min(best, seg_dist(p, poly->verts[i], poly->verts[(i + 1) % n]));
        return best;
    }
    const auto& h = std::get<HalfSpacePrim>(v);
    return std::max((h.normal.dot(x) - h.offset) / h.normal.norm(), 0.0);
}

double convex_inside_depth(const ConvexVariant& v, const Eigen::VectorXd& x) {
    if (const auto* b = std::get_if<BoxPrim>(&v)) {
        double depth = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < x.size(); ++i)
            depth = std::min(depth, std::min(x(i) - b->lo(i), b->hi(i) - x(i)));
        return std::max(depth, 0.0);
    }
    if (const auto* b = std::get_if<BallPrim>(&v)) {
        return std::max(b->radius - (x - b->center).norm(), 0.0);
    }
    if (const auto* poly = std::get_if<PolygonPrim>(&v)) {
        const Eigen::Vector2d p(x(0), x(1));
        if (!polygon_contains(*poly, p)) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        const std::size_t n = poly->verts.size();
        for (std::size_t i = 0; i < n; ++i)
            best = std::min(best, seg_dist(p, poly->verts[i], poly->verts[(i + 1) % n]));
        return best;
    }
    const auto& h = std::get<HalfSpacePrim>(v);
    return std::max((h.offset - h.normal.dot(x)) / h.normal.norm(), 0.0);
}

ConvexVariant as_convex(const PrimVariant& v) {
    if (const auto* b = std::get_if<BoxPrim>(&v)) return *b;
    if (const auto* b = std::get_if<BallPrim>(&v)) return *b;
    if (const auto* b = std::get_if<PolygonPrim>(&v)) return *b;
    if (const auto* b = std::get_if<HalfSpacePrim>(&v)) return *b;
    throw std::invalid_argument("geometry: operation requires a convex primitive");
}

Eigen::VectorXd project_coords(const Eigen::VectorXd& x, const std::vector<int>& coords, int pdim) {
    if (coords.empty()) {
        require(static_cast<int>(x.size()) == pdim, "geometry: point dimension mismatch");
        return x;
    }
    require(static_cast<int>(coords.size()) == pdim, "geometry: coordinate tag size mismatch");
    Eigen::VectorXd out(pdim);
    for (int i = 0; i < pdim; ++i) {
        const int c = coords[static_cast<std::size_t>(i)];
        require(c >= 0 && c < static_cast<int>(x.size()), "geometry: coordinate tag out of range");
        out(i) = x(c);
    }
    return out;
}

double prim_outside_dist(const Primitive& prim, const Eigen::VectorXd& x) {
    const Eigen::VectorXd p = project_coords(x, prim.coords, prim_dim(prim.var));
    if (const auto* c = std::get_if<ComplementPrim>(&prim.var))
        // distance to the complement of (inner + shift) is the depth inside it
        return convex_inside_depth(c->inner, p - c->shift);
    return convex_outside_dist(as_convex(prim.var), p);
}

double prim_inside_depth(const Primitive& prim, const Eigen::VectorXd& x) {
    const Eigen::VectorXd p = project_coords(x, prim.coords, prim_dim(prim.var));
    if (const auto* c = std::get_if<ComplementPrim>(&prim.var))
        return convex_outside_dist(c->inner, p - c->shift);
    return convex_inside_depth(as_convex(prim.var), p);
}

void validate_convex(const ConvexVariant& v) {
    if (const auto* b = std::get_if<BoxPrim>(&v)) {
        require(b->lo.size() == b->hi.size() && b->lo.size() > 0, "box: bound size mismatch");
        require((b->lo.array() <= b->hi.array()).all(), "box: lo must be <= hi");
    } else if (const auto* b = std::get_if<BallPrim>(&v)) {
        require(b->radius > 0.0, "ball: radius must be > 0");
    } else if (const auto* poly = std::get_if<PolygonPrim>(&v)) {
        require(poly->verts.size() >= 3, "polygon: needs at least 3 vertices");
        double area2 = 0.0;
        const std::size_t n = poly->verts.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = poly->verts[i];
            const auto& b2 = poly->verts[(i + 1) % n];
            area2 += a.x() * b2.y() - b2.x() * a.y();
        }
        require(area2 > 0.0, "polygon: vertices must be CCW with positive area");
    } else {
        const auto& h = std::get<HalfSpacePrim>(v);
        require(h.normal.norm() > 0.0, "halfspace: zero normal");
    }
}

}  // namespace

void SetExpr::validate() const {
    require(!prims.empty(), "SetExpr: empty primitive list");
    for (const auto& prim : prims) {
        if (const auto* c = std::get_if<ComplementPrim>(&prim.var)) {
            validate_convex(c->inner);
            require(c->shift.size() == convex_dim(c->inner), "complement: shift dimension mismatch");
        } else {
            validate_convex(as_convex(prim.var));
        }
    }
}

SetExpr make_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, std::vector<int> coords) {
    SetExpr s;
    s.prims.push_back(Primitive{BoxPrim{lo, hi}, std::move(coords)});
    s.validate();
    return s;
}

SetExpr make_ball(const Eigen::VectorXd& center, double radius, std::vector<int> coords) {
    SetExpr s;
    s.prims.push_back(Primitive{BallPrim{center, radius}, std::move(coords)});
    s.validate();
    return s;
}

SetExpr make_polygon(const std::vector<Eigen::Vector2d>& verts, std::vector<int> coords) {
    SetExpr s;
    s.prims.push_back(Primitive{PolygonPrim{verts}, std::move(coords)});
    s.validate();
    return s;
}

SetExpr make_halfspace(const Eigen::VectorXd& normal, double offset, std::vector<int> coords) {
    SetExpr s;
    s.prims.push_back(Primitive{HalfSpacePrim{normal, offset}, std::move(coords)});
    s.validate();
    return s;
}

SetExpr set_union(const SetExpr& a, const SetExpr& b) {
    SetExpr s = a;
    s.prims.insert(s.prims.end(), b.prims.begin(), b.prims.end());
    return s;
}

double dist_to_set(const Eigen::VectorXd& x, const SetExpr& s) {
    require(!s.prims.empty(), "dist_to_set: empty set");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& prim : s.prims) {
        best = std::min(best, prim_outside_dist(prim, x));
        if (best == 0.0) break;
    }
    return best;
}

double dist_to_complement(const Eigen::VectorXd& x, const SetExpr& s) {
    if (s.prims.size() != 1)
        throw std::invalid_argument("dist_to_complement: set must be a single convex primitive");
    return prim_inside_depth(s.prims.front(), x);
}

bool ball_intersects(const Eigen::VectorXd& center, double r, const SetExpr& s) {
    require(r >= 0.0, "ball_intersects: negative radius");
    return dist_to_set(center, s) < r;
}

bool ball_contained(const Eigen::VectorXd& center, double r, const SetExpr& s) {
    require(r >= 0.0, "ball_contained: negative radius");
    if (dist_to_set(center, s) > 0.0) return false;
    return dist_to_complement(center, s) >= r;
}

double volume_ratio(const Eigen::VectorXd& center, double r, const SetExpr& s, int n_mc,
                    std::uint64_t seed) {
    require(n_mc >= 1, "volume_ratio: n_mc must be >= 1");
    if (r <= 0.0) return dist_to_set(center, s) == 0.0 ? 1.0 : 0.0;
    const int dim = static_cast<int>(center.size());
    Rng rng(seed);
    int hits = 0;
    Eigen::VectorXd dir(dim);
    for (int i = 0; i < n_mc; ++i) {
        double norm2 = 0.0;
        do {
            for (int j = 0; j < dim; ++j) dir(j) = rng.normal();
            norm2 = dir.squaredNorm();
        } while (norm2 == 0.0);
        const double radius = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
        const Eigen::VectorXd pt = center + dir * (radius / std::sqrt(norm2));
        if (dist_to_set(pt, s) == 0.0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n_mc);
}

SetExpr control_obstacle(const ControlConstraint& cc, const Eigen::MatrixXd& gain,
                         const Eigen::VectorXd& xbar, const Eigen::VectorXd& ubar) {
    if (cc.u_set.prims.size() != 1)
        throw std::invalid_argument("control_obstacle: U must be a single convex primitive");
    require(gain.cols() == xbar.size(), "control_obstacle: gain/state dimension mismatch");
    require(gain.rows() == ubar.size(), "control_obstacle: gain/control dimension mismatch");
    ComplementPrim comp;
    comp.inner = as_convex(cc.u_set.prims.front().var);
    comp.shift = -(ubar + gain * xbar);  // U - ubar - K xbar
    SetExpr s;
    s.prims.push_back(Primitive{comp, {}});
    return s;
}

Environment make_environment(EnvFamily family, double width, std::uint64_t seed, int state_dim) {
    Environment env;
    env.ws_lo = Eigen::Vector2d(0.0, 0.0);
    env.ws_hi = Eigen::Vector2d(10.0, 10.0);

    const Eigen::Vector2d start(1.0, 1.0);
    const Eigen::Vector2d goal_center(9.0, 9.0);
    const double goal_radius = 0.8;
    env.goal = make_ball(goal_center, goal_radius, {0, 1});

    Rng rng(seed);
    SetExpr obs;
    auto add_box = [&](double cx, double cy, double w, double h) {
        const Eigen::Vector2d lo(cx - w / 2.0, cy - h / 2.0);
        const Eigen::Vector2d hi(cx + w / 2.0, cy + h / 2.0);
        // keep start and goal reachable
        if ((start - lo.cwiseMax(start.cwiseMin(hi))).norm() < 0.6) return;
        if ((goal_center - lo.cwiseMax(goal_center.cwiseMin(hi))).norm() < goal_radius + 0.4) return;
        obs.prims.push_back(Primitive{BoxPrim{lo, hi}, {0, 1}});
    };

    switch (family) {
        case EnvFamily::Scattered:
            add_box(3.0, 2.5, 1.2, 1.2);
            add_box(6.5, 4.0, 1.4, 1.0);
            add_box(2.5, 6.5, 1.0, 1.4);
            add_box(5.0, 8.0, 1.2, 1.0);
            add_box(8.0, 6.0, 1.0, 1.2);
            obs.prims.push_back(Primitive{BallPrim{Eigen::Vector2d(5.0, 5.5), 0.7}, {0, 1}});
            break;
        case EnvFamily::Cluttered:
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double cx = 1.8 + 2.1 * i + 0.25 * ((i + j) % 2);
                    const double cy = 1.8 + 2.1 * j + 0.2 * ((i * j) % 3);
                    add_box(cx, cy, 1.05, 1.05);
                }
            break;
        case EnvFamily::Narrow: {
            // vertical wall at x = 5 with a gap of `width` centered at y = 5
            const double gap_lo = 5.0 - width / 2.0;
            const double gap_hi = 5.0 + width / 2.0;
            obs.prims.push_back(Primitive{
                BoxPrim{Eigen::Vector2d(4.6, -1.0), Eigen::Vector2d(5.4, gap_lo)}, {0, 1}});
            obs.prims.push_back(Primitive{
                BoxPrim{Eigen::Vector2d(4.6, gap_hi), Eigen::Vector2d(5.4, 11.0)}, {0, 1}});
            break;
        }
        case EnvFamily::Random:
            for (int i = 0; i < 10; ++i) {
                const double w = rng.uniform(0.5, 2.0);
                const double h = rng.uniform(0.5, 2.0);
                const double cx = rng.uniform(0.5 + w / 2.0, 9.5 - w / 2.0);
                const double cy = rng.uniform(0.5 + h / 2.0, 9.5 - h / 2.0);
                add_box(cx, cy, w, h);
            }
            break;
    }
    env.obstacles = obs;

    env.state_lo = Eigen::VectorXd::Constant(state_dim, -2.0);
    env.state_hi = Eigen::VectorXd::Constant(state_dim, 2.0);
    env.state_lo.head(2) = env.ws_lo;
    env.state_hi.head(2) = env.ws_hi;
    return env;
}

}  // namespace wdr
