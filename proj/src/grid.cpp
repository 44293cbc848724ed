#include "signorini/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace signorini {

namespace {

void require(bool ok, const std::string& field, const std::string& reason) {
    if (!ok) throw std::invalid_argument("grid." + field + ": " + reason);
}

}  // namespace

void GridSpec::validate() const {
    require(n == 1 || n == 2, "n", "thin dimension must be 1 or 2");
    require(std::isfinite(a) && a > -1.0 && a < 1.0, "a", "weight exponent must lie in (-1,1)");
    require(std::isfinite(R) && R > 0.0, "R", "half-width must be positive");
    require(std::isfinite(Y) && Y > 0.0, "Y", "extension height must be positive");
    require(nx >= 3, "nx", "need at least 3 nodes per thin axis");
    require(ny >= 2, "ny", "need at least 2 nodes on the y-axis");
    require(std::isfinite(y_grading) && y_grading >= 1.0, "y_grading", "grading exponent must be >= 1");
}

WeightedGrid::WeightedGrid(const GridSpec& spec) : spec_(spec) {
    spec_.validate();
    const int nx = spec_.nx;
    const int ny = spec_.ny;
    const double a = spec_.a;
    thin_count_ = spec_.n == 1 ? static_cast<std::size_t>(nx) : static_cast<std::size_t>(nx) * nx;
    hx_ = 2.0 * spec_.R / (nx - 1);

    x_.resize(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) x_[i] = -spec_.R + i * hx_;
    // Exact symmetric centre for odd nx.
    if (nx % 2 == 1) x_[static_cast<std::size_t>(nx / 2)] = 0.0;

    y_.resize(static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) {
        y_[j] = spec_.Y * std::pow(static_cast<double>(j) / (ny - 1), spec_.y_grading);
    }
    y_.front() = 0.0;
    y_.back() = spec_.Y;
    for (int j = 1; j < ny; ++j) {
        if (!(y_[j] > y_[j - 1])) throw std::invalid_argument("grid.y_grading: y-nodes not strictly increasing");
    }

    eta_.resize(y_.size());
    for (std::size_t j = 0; j < y_.size(); ++j) eta_[j] = std::pow(y_[j], 1.0 - a);

    wy_.resize(y_.size());
    for (int j = 0; j < ny; ++j) {
        const double lo = j == 0 ? 0.0 : 0.5 * (y_[j - 1] + y_[j]);
        const double hi = j == ny - 1 ? spec_.Y : 0.5 * (y_[j] + y_[j + 1]);
        wy_[j] = (std::pow(hi, 1.0 + a) - std::pow(lo, 1.0 + a)) / (1.0 + a);
    }

    ty_.resize(static_cast<std::size_t>(ny - 1));
    for (int j = 0; j + 1 < ny; ++j) ty_[j] = (1.0 - a) / (eta_[j + 1] - eta_[j]);
}

std::array<double, 2> WeightedGrid::thin_point(std::size_t thin) const {
    const auto c = thin_coords(thin);
    if (spec_.n == 1) return {x_[c[0]], 0.0};
    return {x_[c[0]], x_[c[1]]};
}

bool WeightedGrid::on_lateral_boundary(std::size_t thin) const {
    const auto c = thin_coords(thin);
    const int last = spec_.nx - 1;
    if (c[0] == 0 || c[0] == last) return true;
    return spec_.n == 2 && (c[1] == 0 || c[1] == last);
}

NodeKind WeightedGrid::kind(std::size_t node) const {
    const int j = level_of(node);
    if (j == spec_.ny - 1 || on_lateral_boundary(thin_of(node))) return NodeKind::Boundary;
    return j == 0 ? NodeKind::Thin : NodeKind::Interior;
}

double WeightedGrid::thin_area(std::size_t thin) const {
    const auto c = thin_coords(thin);
    if (spec_.n == 1) return dx(c[0]);
    return dx(c[0]) * dx(c[1]);
}

double WeightedGrid::x_face_transmissibility(std::size_t thin, int axis, int j) const {
    double transverse = wy(j);
    if (spec_.n == 2) {
        const auto c = thin_coords(thin);
        transverse *= dx(c[1 - axis]);
    }
    return transverse / hx_;
}

std::optional<std::size_t> WeightedGrid::thin_neighbor(std::size_t thin, int axis, int dir) const {
    auto c = thin_coords(thin);
    c[axis] += dir;
    if (c[axis] < 0 || c[axis] >= spec_.nx) return std::nullopt;
    return thin_index(c[0], c[1]);
}

GridPtr build_grid(const GridSpec& spec) { return std::make_shared<const WeightedGrid>(spec); }

Field::Field(GridPtr g, double fill) : grid(std::move(g)), values(grid->node_count(), fill) {}

Field::Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->node_count()) throw std::invalid_argument("field: value count does not match node count");
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

ThinField::ThinField(GridPtr g, double fill) : grid(std::move(g)), values(grid->thin_count(), fill) {}

ThinField::ThinField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->thin_count()) throw std::invalid_argument("thin field: value count does not match thin node count");
}

double ThinField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

namespace {

void check_shape(const WeightedGrid& grid, const Field& u, const char* what) {
    if (u.values.size() != grid.node_count()) {
        throw std::invalid_argument(std::string(what) + ": field shape does not match grid");
    }
}

}  // namespace

double flux_sum(const WeightedGrid& grid, std::span<const double> u, std::size_t node) {
    const std::size_t t = grid.thin_of(node);
    const int j = grid.level_of(node);
    const double un = u[node];
    double sum = 0.0;
    const double area = grid.thin_area(t);
    if (j > 0) sum += grid.ty(j - 1) * area * (u[node - 1] - un);
    if (j < grid.ny() - 1) sum += grid.ty(j) * area * (u[node + 1] - un);
    for (int axis = 0; axis < grid.n(); ++axis) {
        for (int dir : {-1, 1}) {
            const auto nb = grid.thin_neighbor(t, axis, dir);
            if (!nb) continue;
            const std::size_t lower = dir > 0 ? t : *nb;
            sum += grid.x_face_transmissibility(lower, axis, j) * (u[grid.index(*nb, j)] - un);
        }
    }
    return sum;
}

double transmissibility_sum(const WeightedGrid& grid, std::size_t node) {
    const std::size_t t = grid.thin_of(node);
    const int j = grid.level_of(node);
    const double area = grid.thin_area(t);
    double sum = 0.0;
    if (j > 0) sum += grid.ty(j - 1) * area;
    if (j < grid.ny() - 1) sum += grid.ty(j) * area;
    for (int axis = 0; axis < grid.n(); ++axis) {
        for (int dir : {-1, 1}) {
            const auto nb = grid.thin_neighbor(t, axis, dir);
            if (!nb) continue;
            const std::size_t lower = dir > 0 ? t : *nb;
            sum += grid.x_face_transmissibility(lower, axis, j);
        }
    }
    return sum;
}

OperatorResult apply_weighted_operator(const WeightedGrid& grid, const Field& u) {
    check_shape(grid, u, "apply_weighted_operator");
    OperatorResult out{Field(u.grid), std::vector<std::uint8_t>(grid.node_count(), 0)};
    const auto count = static_cast<std::ptrdiff_t>(grid.node_count());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        const auto node = static_cast<std::size_t>(k);
        if (grid.kind(node) != NodeKind::Interior) continue;
        out.value.values[node] = flux_sum(grid, u.values, node);
        out.defined[node] = 1;
    }
    return out;
}

double weighted_dot(const WeightedGrid& grid, const Field& u, const Field& v) {
    check_shape(grid, u, "weighted_dot");
    check_shape(grid, v, "weighted_dot");
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.node_count(); ++k) sum += grid.cell_weight(k) * u.values[k] * v.values[k];
    return sum;
}

ThinField weighted_normal_derivative(const WeightedGrid& grid, const Field& u) {
    check_shape(grid, u, "weighted_normal_derivative");
    ThinField out(u.grid);
    const double scale = (1.0 - grid.a()) / grid.eta(1);
    for (std::size_t t = 0; t < grid.thin_count(); ++t) {
        out.values[t] = scale * (u.values[grid.index(t, 1)] - u.values[grid.index(t, 0)]);
    }
    return out;
}

ThinField trace(const WeightedGrid& grid, const Field& u) {
    check_shape(grid, u, "trace");
    ThinField out(u.grid);
    for (std::size_t t = 0; t < grid.thin_count(); ++t) out.values[t] = u.values[grid.index(t, 0)];
    return out;
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::ostream& os, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    is.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if (!is) throw std::runtime_error("snapshot: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

constexpr char kMagic[8] = {'S', 'G', 'N', 'R', 'S', 'N', 'P', '1'};

}  // namespace

void write_snapshot(const std::string& path, const Field& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path);
    const GridSpec& s = u.grid->spec();
    os.write(kMagic, sizeof(kMagic));
    put<std::int32_t>(os, s.n);
    put<double>(os, s.a);
    put<std::int32_t>(os, s.nx);
    put<std::int32_t>(os, s.ny);
    put<double>(os, s.y_grading);
    put<double>(os, u.time.value_or(std::numeric_limits<double>::quiet_NaN()));
    put<double>(os, s.R);
    put<double>(os, s.Y);
    put<std::uint64_t>(os, u.values.size());
    for (double v : u.values) put<double>(os, v);
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

Field read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw std::runtime_error("snapshot: bad magic in " + path);
    GridSpec s;
    s.n = get<std::int32_t>(is);
    s.a = get<double>(is);
    s.nx = get<std::int32_t>(is);
    s.ny = get<std::int32_t>(is);
    s.y_grading = get<double>(is);
    const double time = get<double>(is);
    s.R = get<double>(is);
    s.Y = get<double>(is);
    const auto count = get<std::uint64_t>(is);
    auto grid = build_grid(s);
    if (count != grid->node_count()) throw std::runtime_error("snapshot: payload size does not match header");
    std::vector<double> values(count);
    for (auto& v : values) v = get<double>(is);
    Field f(grid, std::move(values));
    if (!std::isnan(time)) f.time = time;
    return f;
}

void write_field_csv(std::ostream& os, const Field& u) {
    const WeightedGrid& g = *u.grid;
    os << (g.n() == 1 ? "x1,y,value\n" : "x1,x2,y,value\n");
    os.precision(17);
    for (std::size_t t = 0; t < g.thin_count(); ++t) {
        const auto p = g.thin_point(t);
        for (int j = 0; j < g.ny(); ++j) {
            os << p[0] << ',';
            if (g.n() == 2) os << p[1] << ',';
            os << g.y()[j] << ',' << u.values[g.index(t, j)] << '\n';
        }
    }
}

FieldInterpolator::FieldInterpolator(const WeightedGrid& grid, std::span<const double> values)
    : grid_(grid), values_(values) {
    if (values.size() != grid.node_count()) throw std::invalid_argument("interpolator: shape mismatch");
}

bool FieldInterpolator::contains(std::span<const double> X) const {
    const double R = grid_.spec().R;
    const int n = grid_.n();
    for (int d = 0; d < n; ++d) {
        if (X[d] < -R - 1e-12 || X[d] > R + 1e-12) return false;
    }
    return std::abs(X[n]) <= grid_.spec().Y + 1e-12;
}

namespace {

struct Bracket {
    int lo;
    double t;
};

Bracket bracket_x(const WeightedGrid& g, double x) {
    const double R = g.spec().R;
    const double u = std::clamp((x + R) / g.hx(), 0.0, static_cast<double>(g.nx() - 1));
    int lo = std::min(static_cast<int>(u), g.nx() - 2);
    return {lo, u - lo};
}

Bracket bracket_y(const WeightedGrid& g, double y) {
    const auto ys = g.y();
    y = std::clamp(std::abs(y), 0.0, g.spec().Y);
    auto it = std::upper_bound(ys.begin(), ys.end(), y);
    int hi = static_cast<int>(it - ys.begin());
    hi = std::clamp(hi, 1, g.ny() - 1);
    const int lo = hi - 1;
    const double e = std::pow(y, 1.0 - g.a());
    const double t = (e - g.eta(lo)) / (g.eta(hi) - g.eta(lo));
    return {lo, std::clamp(t, 0.0, 1.0)};
}

}  // namespace

double FieldInterpolator::value(std::span<const double> X) const {
    const int n = grid_.n();
    const Bracket by = bracket_y(grid_, X[n]);
    auto column = [&](std::size_t thin) {
        const double v0 = values_[grid_.index(thin, by.lo)];
        const double v1 = values_[grid_.index(thin, by.lo + 1)];
        return v0 + by.t * (v1 - v0);
    };
    const Bracket b1 = bracket_x(grid_, X[0]);
    if (n == 1) {
        return (1.0 - b1.t) * column(grid_.thin_index(b1.lo)) + b1.t * column(grid_.thin_index(b1.lo + 1));
    }
    const Bracket b2 = bracket_x(grid_, X[1]);
    const double c00 = column(grid_.thin_index(b1.lo, b2.lo));
    const double c01 = column(grid_.thin_index(b1.lo, b2.lo + 1));
    const double c10 = column(grid_.thin_index(b1.lo + 1, b2.lo));
    const double c11 = column(grid_.thin_index(b1.lo + 1, b2.lo + 1));
    return (1.0 - b1.t) * ((1.0 - b2.t) * c00 + b2.t * c01) + b1.t * ((1.0 - b2.t) * c10 + b2.t * c11);
}

NodalGradient nodal_gradient(const WeightedGrid& grid, std::span<const double> u) {
    NodalGradient g;
    const std::size_t count = grid.node_count();
    g.dx1.assign(count, 0.0);
    g.dx2.assign(grid.n() == 2 ? count : 0, 0.0);
    g.flux_y.assign(count, 0.0);
    const double h = grid.hx();
    const int ny = grid.ny();
    const double one_minus_a = 1.0 - grid.a();
    for (std::size_t t = 0; t < grid.thin_count(); ++t) {
        for (int axis = 0; axis < grid.n(); ++axis) {
            auto& out = axis == 0 ? g.dx1 : g.dx2;
            const auto lo = grid.thin_neighbor(t, axis, -1);
            const auto hi = grid.thin_neighbor(t, axis, +1);
            for (int j = 0; j < ny; ++j) {
                const std::size_t k = grid.index(t, j);
                if (lo && hi) {
                    out[k] = (u[grid.index(*hi, j)] - u[grid.index(*lo, j)]) / (2.0 * h);
                } else if (hi) {
                    const auto hi2 = grid.thin_neighbor(*hi, axis, +1);
                    out[k] = (-3.0 * u[k] + 4.0 * u[grid.index(*hi, j)] - u[grid.index(*hi2, j)]) / (2.0 * h);
                } else {
                    const auto lo2 = grid.thin_neighbor(*lo, axis, -1);
                    out[k] = (3.0 * u[k] - 4.0 * u[grid.index(*lo, j)] + u[grid.index(*lo2, j)]) / (2.0 * h);
                }
            }
        }
        for (int j = 0; j < ny; ++j) {
            const std::size_t k = grid.index(t, j);
            double d;
            if (j == 0) {
                d = (u[k + 1] - u[k]) / (grid.eta(1) - grid.eta(0));
            } else if (j == ny - 1) {
                d = (u[k] - u[k - 1]) / (grid.eta(j) - grid.eta(j - 1));
            } else {
                const double e0 = grid.eta(j - 1), e1 = grid.eta(j), e2 = grid.eta(j + 1);
                const double h0 = e1 - e0, h1 = e2 - e1;
                d = (-h1 / (h0 * (h0 + h1))) * u[k - 1] + ((h1 - h0) / (h0 * h1)) * u[k] +
                    (h0 / (h1 * (h0 + h1))) * u[k + 1];
            }
            g.flux_y[k] = one_minus_a * d;
        }
    }
    return g;
}

}  // namespace signorini
