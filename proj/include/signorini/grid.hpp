#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace signorini {

// Tensor grid over the thin box [-R,R]^n times the extension interval [0,Y].
// y-nodes are graded towards the thin set: y_j = Y (j/(ny-1))^p.
struct GridSpec {
    int n = 1;
    double a = 0.0;
    double R = 1.0;
    double Y = 1.0;
    int nx = 65;
    int ny = 33;
    double y_grading = 2.0;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class NodeKind : std::uint8_t { Interior, Thin, Boundary };

class WeightedGrid {
public:
    explicit WeightedGrid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    int n() const { return spec_.n; }
    double a() const { return spec_.a; }
    // Fractional power s = (1-a)/2.
    double s() const { return 0.5 * (1.0 - spec_.a); }
    int nx() const { return spec_.nx; }
    int ny() const { return spec_.ny; }

    std::size_t thin_count() const { return thin_count_; }
    std::size_t node_count() const { return thin_count_ * static_cast<std::size_t>(spec_.ny); }

    // Node storage is row-major over (x1[, x2], y) with y fastest, so each
    // thin index owns a contiguous column.
    std::size_t index(std::size_t thin, int j) const {
        return thin * static_cast<std::size_t>(spec_.ny) + static_cast<std::size_t>(j);
    }
    std::size_t thin_of(std::size_t node) const { return node / static_cast<std::size_t>(spec_.ny); }
    int level_of(std::size_t node) const { return static_cast<int>(node % static_cast<std::size_t>(spec_.ny)); }

    std::size_t thin_index(int i1, int i2 = 0) const {
        return spec_.n == 1 ? static_cast<std::size_t>(i1)
                            : static_cast<std::size_t>(i1) * spec_.nx + static_cast<std::size_t>(i2);
    }
    std::array<int, 2> thin_coords(std::size_t thin) const {
        if (spec_.n == 1) return {static_cast<int>(thin), 0};
        return {static_cast<int>(thin / spec_.nx), static_cast<int>(thin % spec_.nx)};
    }

    std::span<const double> x() const { return x_; }
    std::span<const double> y() const { return y_; }
    double hx() const { return hx_; }

    // Thin-space coordinates of a thin index (second entry 0 when n = 1).
    std::array<double, 2> thin_point(std::size_t thin) const;

    bool on_lateral_boundary(std::size_t thin) const;
    NodeKind kind(std::size_t node) const;

    // Dual cell width along a thin axis for node coordinate i.
    double dx(int i) const { return (i == 0 || i == spec_.nx - 1) ? 0.5 * hx_ : hx_; }
    // Transverse thin area of the dual cell above a thin index.
    double thin_area(std::size_t thin) const;
    // Integral of y^a over the dual y-cell of level j.
    double wy(int j) const { return wy_[static_cast<std::size_t>(j)]; }
    // Integral of y^a over the dual cell of a node.
    double cell_weight(std::size_t node) const { return wy(level_of(node)) * thin_area(thin_of(node)); }

    // Per-unit-area transmissibility of the y-face between levels j and j+1:
    // (1-a) / (y_{j+1}^{1-a} - y_j^{1-a}).
    double ty(int j) const { return ty_[static_cast<std::size_t>(j)]; }
    double y_face_transmissibility(std::size_t thin, int j) const { return ty(j) * thin_area(thin); }
    // Transmissibility of the face between thin index t and its +axis neighbour at level j.
    double x_face_transmissibility(std::size_t thin, int axis, int j) const;

    // Neighbour thin index along axis (0 or 1) in direction dir (+1/-1); nullopt outside.
    std::optional<std::size_t> thin_neighbor(std::size_t thin, int axis, int dir) const;

    // Coordinate eta = y^(1-a); exact linear coordinate for the degenerate flux.
    double eta(int j) const { return eta_[static_cast<std::size_t>(j)]; }

private:
    GridSpec spec_;
    std::size_t thin_count_ = 0;
    double hx_ = 0.0;
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> eta_;
    std::vector<double> wy_;
    std::vector<double> ty_;
};

using GridPtr = std::shared_ptr<const WeightedGrid>;

GridPtr build_grid(const GridSpec& spec);

// Nodal values on a grid, optionally tagged with a time.
struct Field {
    GridPtr grid;
    std::vector<double> values;
    std::optional<double> time;

    Field() = default;
    Field(GridPtr g, double fill = 0.0);
    Field(GridPtr g, std::vector<double> v);

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
    double max_abs() const;
};

// Values on the thin slice {y = 0}.
struct ThinField {
    GridPtr grid;
    std::vector<double> values;

    ThinField() = default;
    ThinField(GridPtr g, double fill = 0.0);
    ThinField(GridPtr g, std::vector<double> v);

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
    double max_abs() const;
};

struct OperatorResult {
    Field value;                       // integrated flux divergence per dual cell
    std::vector<std::uint8_t> defined;  // 1 at interior nodes with y > 0
};

// Cell-integrated discrete div(y^a grad u): sum over faces of T (u_nb - u).
// Comparable to cell_weight times the pointwise value.
OperatorResult apply_weighted_operator(const WeightedGrid& grid, const Field& u);

// Same flux sum at a single node, taken over every existing neighbour.
double flux_sum(const WeightedGrid& grid, std::span<const double> u, std::size_t node);
// Sum of transmissibilities of all faces at a node.
double transmissibility_sum(const WeightedGrid& grid, std::size_t node);

double weighted_dot(const WeightedGrid& grid, const Field& u, const Field& v);

// (1-a) (u(x,y1) - u(x,0)) / y1^(1-a) at each thin node.
ThinField weighted_normal_derivative(const WeightedGrid& grid, const Field& u);

ThinField trace(const WeightedGrid& grid, const Field& u);

// Binary snapshot: magic "SGNRSNP1", int32 n, f64 a, int32 nx, int32 ny, f64 p,
// f64 time (NaN when absent), f64 R, f64 Y, u64 count, then count f64 values.
// All little-endian.
void write_snapshot(const std::string& path, const Field& u);
Field read_snapshot(const std::string& path);
void write_field_csv(std::ostream& os, const Field& u);

// Interpolation of nodal data at arbitrary points of the half-space box.
// Linear in x and linear in eta = y^(1-a) in the vertical direction, which is
// exact for u0(x) + c y^(1-a).
class FieldInterpolator {
public:
    FieldInterpolator(const WeightedGrid& grid, std::span<const double> values);

    // X = (x1, [x2,] y); y is taken as |y| (even reflection). Points outside the
    // box are clamped to it.
    double value(std::span<const double> X) const;
    bool contains(std::span<const double> X) const;

private:
    const WeightedGrid& grid_;
    std::span<const double> values_;
};

// Nodal gradient data used by the functionals: dx-components from centred
// differences and the weighted vertical flux y^a u_y = (1-a) du/deta.
struct NodalGradient {
    std::vector<double> dx1;
    std::vector<double> dx2;
    std::vector<double> flux_y;
};

NodalGradient nodal_gradient(const WeightedGrid& grid, std::span<const double> u);

}  // namespace signorini
