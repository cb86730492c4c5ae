#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace wdr {

// Primitive convex sets. An optional coordinate list tags the subspace of a
// larger state space the primitive constrains (a box on coords {0,1} of a
// 4-D state is the cylinder box x R^2).
struct BoxPrim {
    Eigen::VectorXd lo, hi;
};

struct BallPrim {
    Eigen::VectorXd center;
    double radius = 0.0;
};

// 2-D convex polygon, CCW and simple.
struct PolygonPrim {
    std::vector<Eigen::Vector2d> verts;
};

// a . x <= b
struct HalfSpacePrim {
    Eigen::VectorXd normal;
    double offset = 0.0;
};

using ConvexVariant = std::variant<BoxPrim, BallPrim, PolygonPrim, HalfSpacePrim>;

// Complement of a shifted convex primitive: points NOT in (inner + shift).
// Carries the control-constraint obstacle R^m \ (U - ubar - K xbar).
struct ComplementPrim {
    ConvexVariant inner;
    Eigen::VectorXd shift;
};

using PrimVariant = std::variant<BoxPrim, BallPrim, PolygonPrim, HalfSpacePrim, ComplementPrim>;

struct Primitive {
    PrimVariant var;
    // coordinate indices of the ambient space this primitive constrains;
    // empty means it matches the query dimension directly
    std::vector<int> coords;
};

// Union of primitives (obstacle sets) or a single primitive (goal,
// confidence balls). Distance queries dispatch per primitive.
struct SetExpr {
    std::vector<Primitive> prims;

    bool empty() const { return prims.empty(); }
    void validate() const;
};

SetExpr make_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, std::vector<int> coords = {});
SetExpr make_ball(const Eigen::VectorXd& center, double radius, std::vector<int> coords = {});
SetExpr make_polygon(const std::vector<Eigen::Vector2d>& verts, std::vector<int> coords = {});
SetExpr make_halfspace(const Eigen::VectorXd& normal, double offset, std::vector<int> coords = {});
SetExpr set_union(const SetExpr& a, const SetExpr& b);

// Euclidean distance from a point to the set; 0 iff the point lies in the
// closure. Unions take the minimum over primitives.
double dist_to_set(const Eigen::VectorXd& x, const SetExpr& s);

// Depth: distance to the boundary when the point is inside, 0 outside.
// Only defined for a single convex primitive; throws otherwise.
double dist_to_complement(const Eigen::VectorXd& x, const SetExpr& s);

// Open-ball convention: a boundary touch does not count as intersecting.
bool ball_intersects(const Eigen::VectorXd& center, double r, const SetExpr& s);

// True when the closed ball lies inside the (convex) set.
bool ball_contained(const Eigen::VectorXd& center, double r, const SetExpr& s);

// Monte Carlo estimate of Vol(ball(center, r) cap S) / Vol(ball), uniform
// sampling in the ball, deterministic per seed.
double volume_ratio(const Eigen::VectorXd& center, double r, const SetExpr& s, int n_mc,
                    std::uint64_t seed);

// Control-effort constraint "u in U" written as an obstacle in the feedback
// projection space: the complement of U - ubar - K xbar.
struct ControlConstraint {
    SetExpr u_set;  // single convex primitive in control space
};

SetExpr control_obstacle(const ControlConstraint& cc, const Eigen::MatrixXd& gain,
                         const Eigen::VectorXd& xbar, const Eigen::VectorXd& ubar);

// Workspace description used by the planner and the checkers.
struct Environment {
    Eigen::VectorXd ws_lo, ws_hi;        // workspace box
    SetExpr obstacles;                   // union, workspace coordinates
    SetExpr goal;                        // single convex primitive
    std::optional<ControlConstraint> control;
    Eigen::VectorXd state_lo, state_hi;  // sampling bounds for full states
};

enum class EnvFamily { Scattered, Cluttered, Narrow, Random };

// Seeded generators for the benchmark families. `width` only applies to the
// narrow-passage family.
Environment make_environment(EnvFamily family, double width, std::uint64_t seed, int state_dim);

}  // namespace wdr
