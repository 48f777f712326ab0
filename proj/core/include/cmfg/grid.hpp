#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cmfg {

/**
 * Uniform cell-centered discretization of the unit box [0,1]^n, n in {1,2}.
 *
 * Cells are numbered lexicographically with axis 0 fastest. Faces normal to
 * axis d are numbered the same way, with N+1 positions along d. Scalars live
 * at cell centers and vector components on the faces normal to their axis
 * (staggered MAC layout).
 */
class GridSpec {
public:
    static constexpr int kMaxDimension = 2;

    GridSpec(int dimension, int cells_per_axis);

    int dimension() const noexcept { return dim_; }
    int cells_per_axis() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    /// h^n, the quadrature weight of one cell.
    double cell_volume() const noexcept { return vol_; }
    std::size_t num_cells() const noexcept { return cells_; }
    std::size_t num_faces(int axis) const;

    std::size_t cell_index(int i, int j = 0) const noexcept {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_) * static_cast<std::size_t>(j);
    }
    std::array<int, 2> cell_coords(std::size_t cell) const noexcept;
    std::array<double, 2> cell_center(std::size_t cell) const noexcept;

    std::size_t lower_face(int axis, std::size_t cell) const noexcept;
    std::size_t upper_face(int axis, std::size_t cell) const noexcept;

    struct FaceCells {
        bool boundary;
        std::size_t lower;  // valid only when !boundary
        std::size_t upper;
    };
    FaceCells face_cells(int axis, std::size_t face) const noexcept;
    /// Position of a face center.
    std::array<double, 2> face_center(int axis, std::size_t face) const noexcept;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int dim_;
    int n_;
    double h_;
    double vol_;
    std::size_t cells_;
};

class ScalarField {
public:
    explicit ScalarField(const GridSpec& spec, double fill = 0.0);
    ScalarField(const GridSpec& spec, std::vector<double> values);

    template <typename Fn>
    static ScalarField from_function(const GridSpec& spec, Fn&& fn) {
        ScalarField out(spec);
        for (std::size_t c = 0; c < spec.num_cells(); ++c) out[c] = fn(spec.cell_center(c));
        return out;
    }

    const GridSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    double min() const;
    double max() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);
    ScalarField& operator+=(double s);

private:
    GridSpec spec_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Cell-wise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/**
 * Face-centered vector field: component d holds the values on faces normal
 * to axis d. A flux is Neumann-compatible when every boundary-normal face
 * value is zero.
 */
class VectorField {
public:
    explicit VectorField(const GridSpec& spec);

    const GridSpec& spec() const noexcept { return spec_; }
    std::span<const double> component(int axis) const { return comp_.at(static_cast<std::size_t>(axis)); }
    std::span<double> component(int axis) { return comp_.at(static_cast<std::size_t>(axis)); }

    bool is_neumann_compatible() const;
    void zero_boundary_faces();
    double max_abs() const;

    VectorField& operator+=(const VectorField& other);
    VectorField& operator-=(const VectorField& other);
    VectorField& operator*=(double s);

private:
    GridSpec spec_;
    std::array<std::vector<double>, GridSpec::kMaxDimension> comp_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

// Discrete calculus. All operators are pure.

/// h^n * sum of values (midpoint rule).
double integrate(const ScalarField& f);
/// h^n * sum f_i g_i.
double inner(const ScalarField& f, const ScalarField& g);
/// h^n * sum over all faces of F_d G_d.
double face_inner(const VectorField& f, const VectorField& g);

/// Face differences (u_upper - u_lower)/h; boundary-normal faces are zero.
VectorField gradient(const ScalarField& u);
/// Cell value sum_d (F_upper - F_lower)/h.
ScalarField divergence(const VectorField& f);
/// divergence(gradient(u)); the 2n+1 point stencil with reflected boundary.
ScalarField laplacian(const ScalarField& u);

/// (h^n sum |f|^p)^(1/p), p >= 1. p may be +infinity (max-norm).
double norm_lp(const ScalarField& f, double p);
/// Discrete L2 norm of a face field with h^n face weights.
double norm_l2(const VectorField& f);
double max_abs(const ScalarField& f);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

}  // namespace cmfg
