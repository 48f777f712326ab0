#include "cmfg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "format.hpp"

namespace cmfg {

GridSpec::GridSpec(int dimension, int cells_per_axis) : dim_(dimension), n_(cells_per_axis) {
    if (dimension < 1 || dimension > kMaxDimension) {
        throw std::invalid_argument("GridSpec: dimension must be 1 or 2, got " + std::to_string(dimension));
    }
    if (cells_per_axis < 4) {
        throw std::invalid_argument("GridSpec: cells_per_axis must be >= 4, got " + std::to_string(cells_per_axis));
    }
    h_ = 1.0 / static_cast<double>(n_);
    vol_ = dim_ == 1 ? h_ : h_ * h_;
    cells_ = dim_ == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
}

std::size_t GridSpec::num_faces(int axis) const {
    if (axis < 0 || axis >= dim_) throw std::out_of_range("GridSpec::num_faces: bad axis");
    const auto n = static_cast<std::size_t>(n_);
    return dim_ == 1 ? n + 1 : (n + 1) * n;
}

std::array<int, 2> GridSpec::cell_coords(std::size_t cell) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    return {static_cast<int>(cell % n), static_cast<int>(cell / n)};
}

std::array<double, 2> GridSpec::cell_center(std::size_t cell) const noexcept {
    const auto [i, j] = cell_coords(cell);
    return {(i + 0.5) * h_, dim_ == 2 ? (j + 0.5) * h_ : 0.0};
}

std::size_t GridSpec::lower_face(int axis, std::size_t cell) const noexcept {
    const auto [i, j] = cell_coords(cell);
    const auto n = static_cast<std::size_t>(n_);
    if (axis == 0) return static_cast<std::size_t>(i) + (n + 1) * static_cast<std::size_t>(j);
    return static_cast<std::size_t>(i) + n * static_cast<std::size_t>(j);
}

std::size_t GridSpec::upper_face(int axis, std::size_t cell) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    return axis == 0 ? lower_face(0, cell) + 1 : lower_face(1, cell) + n;
}

GridSpec::FaceCells GridSpec::face_cells(int axis, std::size_t face) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    if (axis == 0) {
        const std::size_t k = face % (n + 1);
        const std::size_t j = face / (n + 1);
        if (k == 0 || k == n) return {true, 0, 0};
        return {false, k - 1 + n * j, k + n * j};
    }
    const std::size_t i = face % n;
    const std::size_t k = face / n;
    if (k == 0 || k == n) return {true, 0, 0};
    return {false, i + n * (k - 1), i + n * k};
}

std::array<double, 2> GridSpec::face_center(int axis, std::size_t face) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    if (axis == 0) {
        const std::size_t k = face % (n + 1);
        const std::size_t j = face / (n + 1);
        return {static_cast<double>(k) * h_, dim_ == 2 ? (static_cast<double>(j) + 0.5) * h_ : 0.0};
    }
    const std::size_t i = face % n;
    const std::size_t k = face / n;
    return {(static_cast<double>(i) + 0.5) * h_, static_cast<double>(k) * h_};
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(const GridSpec& spec, double fill) : spec_(spec), values_(spec.num_cells(), fill) {}

ScalarField::ScalarField(const GridSpec& spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.num_cells()) {
        throw std::invalid_argument("ScalarField: expected " + std::to_string(spec_.num_cells()) + " values, got " +
                                    std::to_string(values_.size()));
    }
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(spec_, other.spec_, "ScalarField::operator+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(spec_, other.spec_, "ScalarField::operator-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
}

ScalarField& ScalarField::operator+=(double s) {
    for (auto& v : values_) v += s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.spec(), b.spec(), "hadamard");
    ScalarField out(a.spec());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(const GridSpec& spec) : spec_(spec) {
    for (int d = 0; d < spec.dimension(); ++d) comp_[static_cast<std::size_t>(d)].assign(spec.num_faces(d), 0.0);
}

bool VectorField::is_neumann_compatible() const {
    for (int d = 0; d < spec_.dimension(); ++d) {
        const auto& c = comp_[static_cast<std::size_t>(d)];
        for (std::size_t f = 0; f < c.size(); ++f) {
            if (spec_.face_cells(d, f).boundary && c[f] != 0.0) return false;
        }
    }
    return true;
}

void VectorField::zero_boundary_faces() {
    for (int d = 0; d < spec_.dimension(); ++d) {
        auto& c = comp_[static_cast<std::size_t>(d)];
        for (std::size_t f = 0; f < c.size(); ++f) {
            if (spec_.face_cells(d, f).boundary) c[f] = 0.0;
        }
    }
}

double VectorField::max_abs() const {
    double m = 0.0;
    for (int d = 0; d < spec_.dimension(); ++d) {
        for (double v : comp_[static_cast<std::size_t>(d)]) m = std::max(m, std::abs(v));
    }
    return m;
}

VectorField& VectorField::operator+=(const VectorField& other) {
    require_same_grid(spec_, other.spec_, "VectorField::operator+=");
    for (int d = 0; d < spec_.dimension(); ++d) {
        auto& a = comp_[static_cast<std::size_t>(d)];
        const auto& b = other.comp_[static_cast<std::size_t>(d)];
        for (std::size_t f = 0; f < a.size(); ++f) a[f] += b[f];
    }
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
    require_same_grid(spec_, other.spec_, "VectorField::operator-=");
    for (int d = 0; d < spec_.dimension(); ++d) {
        auto& a = comp_[static_cast<std::size_t>(d)];
        const auto& b = other.comp_[static_cast<std::size_t>(d)];
        for (std::size_t f = 0; f < a.size(); ++f) a[f] -= b[f];
    }
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (int d = 0; d < spec_.dimension(); ++d) {
        for (auto& v : comp_[static_cast<std::size_t>(d)]) v *= s;
    }
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

// ---------------------------------------------------------------------------
// Discrete calculus

double integrate(const ScalarField& f) {
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    return f.spec().cell_volume() * sum;
}

double inner(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.spec(), g.spec(), "inner");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
    return f.spec().cell_volume() * sum;
}

double face_inner(const VectorField& f, const VectorField& g) {
    require_same_grid(f.spec(), g.spec(), "face_inner");
    double sum = 0.0;
    for (int d = 0; d < f.spec().dimension(); ++d) {
        const auto a = f.component(d);
        const auto b = g.component(d);
        for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
    }
    return f.spec().cell_volume() * sum;
}

VectorField gradient(const ScalarField& u) {
    const GridSpec& spec = u.spec();
    const double inv_h = 1.0 / spec.spacing();
    VectorField g(spec);
    for (int d = 0; d < spec.dimension(); ++d) {
        auto comp = g.component(d);
        for (std::size_t f = 0; f < comp.size(); ++f) {
            const auto fc = spec.face_cells(d, f);
            comp[f] = fc.boundary ? 0.0 : (u[fc.upper] - u[fc.lower]) * inv_h;
        }
    }
    return g;
}

ScalarField divergence(const VectorField& f) {
    const GridSpec& spec = f.spec();
    const double inv_h = 1.0 / spec.spacing();
    ScalarField out(spec);
    for (int d = 0; d < spec.dimension(); ++d) {
        const auto comp = f.component(d);
        for (std::size_t c = 0; c < spec.num_cells(); ++c) {
            out[c] += (comp[spec.upper_face(d, c)] - comp[spec.lower_face(d, c)]) * inv_h;
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& u) { return divergence(gradient(u)); }

double norm_lp(const ScalarField& f, double p) {
    if (std::isinf(p) && p > 0) return max_abs(f);
    if (!(p >= 1.0)) throw std::invalid_argument("norm_lp: p must be >= 1, got " + detail::format_number(p));
    double sum = 0.0;
    if (p == 1.0) {
        for (double v : f.values()) sum += std::abs(v);
        return f.spec().cell_volume() * sum;
    }
    if (p == 2.0) {
        for (double v : f.values()) sum += v * v;
        return std::sqrt(f.spec().cell_volume() * sum);
    }
    for (double v : f.values()) sum += std::pow(std::abs(v), p);
    return std::pow(f.spec().cell_volume() * sum, 1.0 / p);
}

double norm_l2(const VectorField& f) { return std::sqrt(face_inner(f, f)); }

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace cmfg
