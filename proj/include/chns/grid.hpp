#pragma once

// Uniform rectangular MAC grid: scalars live at cell centres, the x-velocity on
// vertical faces and the y-velocity on horizontal faces.  All operators below
// are second order and honour homogeneous Neumann data for scalars and no-slip
// data for velocities.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "chns/error.hpp"

namespace chns {

using Index = Eigen::Index;

template <typename Scalar>
using Array2 = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

struct Grid {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    double hx = 0.0;
    double hy = 0.0;

    double cell_area() const { return hx * hy; }
    double domain_area() const { return lx * ly; }
    Index cells() const { return Index(nx) * ny; }
    double xc(int i) const { return (i + 0.5) * hx; }
    double yc(int j) const { return (j + 0.5) * hy; }
    /// Number of x-faces and y-faces, boundary faces included.
    Index x_faces() const { return Index(nx + 1) * ny; }
    Index y_faces() const { return Index(nx) * (ny + 1); }
    Index faces() const { return x_faces() + y_faces(); }

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

inline Grid make_grid(int nx, int ny, double lx, double ly) {
    if (nx < 4 || ny < 4)
        throw InvalidArgument("make_grid: need at least 4 cells per direction, got " +
                              std::to_string(nx) + "x" + std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw InvalidArgument("make_grid: domain lengths must be positive and finite");
    return Grid{nx, ny, lx, ly, lx / nx, ly / ny};
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b) throw InvalidArgument(std::string(where) + ": grid mismatch");
}

template <typename Scalar>
struct ScalarFieldT {
    Grid grid;
    Array2<Scalar> values;  // nx x ny, column-major so index = i + nx*j

    ScalarFieldT() = default;
    explicit ScalarFieldT(const Grid& g, Scalar fill = Scalar(0))
        : grid(g), values(Array2<Scalar>::Constant(g.nx, g.ny, fill)) {}
    ScalarFieldT(const Grid& g, Array2<Scalar> v) : grid(g), values(std::move(v)) {
        if (values.rows() != g.nx || values.cols() != g.ny)
            throw InvalidArgument("ScalarField: shape does not match grid");
    }

    Scalar& operator()(int i, int j) { return values(i, j); }
    Scalar operator()(int i, int j) const { return values(i, j); }

    template <typename F>
    static ScalarFieldT from_function(const Grid& g, F&& f) {
        ScalarFieldT out(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.xc(i), g.yc(j));
        return out;
    }

    auto vec() { return Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(values.data(), values.size()); }
    auto vec() const {
        return Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(values.data(), values.size());
    }

    ScalarFieldT& operator+=(const ScalarFieldT& o) { values += o.values; return *this; }
    ScalarFieldT& operator-=(const ScalarFieldT& o) { values -= o.values; return *this; }
    ScalarFieldT& operator*=(Scalar s) { values *= s; return *this; }
};

template <typename Scalar>
ScalarFieldT<Scalar> operator+(ScalarFieldT<Scalar> a, const ScalarFieldT<Scalar>& b) { return a += b; }
template <typename Scalar>
ScalarFieldT<Scalar> operator-(ScalarFieldT<Scalar> a, const ScalarFieldT<Scalar>& b) { return a -= b; }
template <typename Scalar>
ScalarFieldT<Scalar> operator*(Scalar s, ScalarFieldT<Scalar> a) { return a *= s; }

template <typename Scalar>
struct MACVelocityT {
    Grid grid;
    Array2<Scalar> u;  // (nx+1) x ny, x-faces at (i*hx, (j+1/2)*hy)
    Array2<Scalar> v;  // nx x (ny+1), y-faces at ((i+1/2)*hx, j*hy)

    MACVelocityT() = default;
    explicit MACVelocityT(const Grid& g)
        : grid(g),
          u(Array2<Scalar>::Zero(g.nx + 1, g.ny)),
          v(Array2<Scalar>::Zero(g.nx, g.ny + 1)) {}

    void zero_normals() {
        u.row(0).setZero();
        u.row(grid.nx).setZero();
        v.col(0).setZero();
        v.col(grid.ny).setZero();
    }

    MACVelocityT& operator+=(const MACVelocityT& o) { u += o.u; v += o.v; return *this; }
    MACVelocityT& operator-=(const MACVelocityT& o) { u -= o.u; v -= o.v; return *this; }
    MACVelocityT& operator*=(Scalar s) { u *= s; v *= s; return *this; }
};

template <typename Scalar>
MACVelocityT<Scalar> operator+(MACVelocityT<Scalar> a, const MACVelocityT<Scalar>& b) { return a += b; }
template <typename Scalar>
MACVelocityT<Scalar> operator-(MACVelocityT<Scalar> a, const MACVelocityT<Scalar>& b) { return a -= b; }
template <typename Scalar>
MACVelocityT<Scalar> operator*(Scalar s, MACVelocityT<Scalar> a) { return a *= s; }

using ScalarField = ScalarFieldT<double>;
using MACVelocity = MACVelocityT<double>;

// ---------------------------------------------------------------------------
// Packing of face unknowns: x-faces first (i + (nx+1)*j), then y-faces
// (nu + i + nx*j).  Boundary-normal faces keep their slot but never couple.

struct FaceLayout {
    int nx, ny;
    Index nu;
    explicit FaceLayout(const Grid& g) : nx(g.nx), ny(g.ny), nu(g.x_faces()) {}
    Index u(int i, int j) const { return i + Index(nx + 1) * j; }
    Index v(int i, int j) const { return nu + i + Index(nx) * j; }
    Index size() const { return nu + Index(nx) * (ny + 1); }
    bool u_boundary(int i) const { return i == 0 || i == nx; }
    bool v_boundary(int j) const { return j == 0 || j == ny; }
    bool is_boundary(Index dof) const {
        if (dof < nu) return u_boundary(int(dof % (nx + 1)));
        return v_boundary(int((dof - nu) / nx));
    }
};

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> pack(const MACVelocityT<Scalar>& w) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(w.grid.faces());
    const Index nu = w.grid.x_faces();
    x.head(nu) = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(w.u.data(), nu);
    x.tail(x.size() - nu) = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(w.v.data(), w.v.size());
    return x;
}

template <typename Scalar, typename Derived>
MACVelocityT<Scalar> unpack(const Grid& g, const Eigen::MatrixBase<Derived>& x) {
    MACVelocityT<Scalar> w(g);
    const Index nu = g.x_faces();
    Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(w.u.data(), nu) = x.head(nu);
    Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(w.v.data(), w.v.size()) = x.tail(x.size() - nu);
    return w;
}

inline MACVelocity unpack(const Grid& g, const Eigen::VectorXd& x) { return unpack<double>(g, x); }

// ---------------------------------------------------------------------------
// Scalar operators

/// 5-point Laplacian with mirrored ghosts (zero normal flux on every wall).
template <typename Scalar>
ScalarFieldT<Scalar> laplacian_neumann(const ScalarFieldT<Scalar>& f) {
    const Grid& g = f.grid;
    const Scalar ix2 = Scalar(1) / (g.hx * g.hx);
    const Scalar iy2 = Scalar(1) / (g.hy * g.hy);
    ScalarFieldT<Scalar> out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Scalar c = f(i, j);
            Scalar acc(0);
            if (i > 0) acc += (f(i - 1, j) - c) * ix2;
            if (i + 1 < g.nx) acc += (f(i + 1, j) - c) * ix2;
            if (j > 0) acc += (f(i, j - 1) - c) * iy2;
            if (j + 1 < g.ny) acc += (f(i, j + 1) - c) * iy2;
            out(i, j) = acc;
        }
    }
    return out;
}

/// Face-normal differences; boundary-normal components are zero.
template <typename Scalar>
MACVelocityT<Scalar> gradient_to_faces(const ScalarFieldT<Scalar>& f) {
    const Grid& g = f.grid;
    MACVelocityT<Scalar> w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) w.u(i, j) = (f(i, j) - f(i - 1, j)) / g.hx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) w.v(i, j) = (f(i, j) - f(i, j - 1)) / g.hy;
    return w;
}

template <typename Scalar>
ScalarFieldT<Scalar> divergence_mac(const MACVelocityT<Scalar>& w) {
    const Grid& g = w.grid;
    ScalarFieldT<Scalar> out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (w.u(i + 1, j) - w.u(i, j)) / g.hx + (w.v(i, j + 1) - w.v(i, j)) / g.hy;
    return out;
}

/// div(w f) with f averaged to faces.  Wall fluxes are taken as zero, so the
/// result always integrates to zero.
template <typename Scalar>
ScalarFieldT<Scalar> advect_scalar(const MACVelocityT<Scalar>& w, const ScalarFieldT<Scalar>& f) {
    const Grid& g = f.grid;
    require_same_grid(w.grid, g, "advect_scalar");
    ScalarFieldT<Scalar> out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const Scalar flux = w.u(i, j) * Scalar(0.5) * (f(i - 1, j) + f(i, j)) / g.hx;
            out(i - 1, j) += flux;
            out(i, j) -= flux;
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Scalar flux = w.v(i, j) * Scalar(0.5) * (f(i, j - 1) + f(i, j)) / g.hy;
            out(i, j - 1) += flux;
            out(i, j) -= flux;
        }
    }
    return out;
}

/// Skew-symmetric momentum transport of x by the advecting field w on the
/// staggered control volumes.  <convect_skew(w, x), x> = 0 for every w; when w
/// is discretely solenoidal it coincides with the divergence form.
template <typename Scalar>
MACVelocityT<Scalar> convect_skew(const MACVelocityT<Scalar>& w, const MACVelocityT<Scalar>& x) {
    const Grid& g = x.grid;
    require_same_grid(w.grid, g, "convect_skew");
    const int nx = g.nx, ny = g.ny;
    auto wu = [&](int i, int j) { return (i == 0 || i == nx) ? Scalar(0) : w.u(i, j); };
    auto wv = [&](int i, int j) { return (j == 0 || j == ny) ? Scalar(0) : w.v(i, j); };
    auto xu = [&](int i, int j) { return (i == 0 || i == nx) ? Scalar(0) : x.u(i, j); };
    auto xv = [&](int i, int j) { return (j == 0 || j == ny) ? Scalar(0) : x.v(i, j); };
    const Scalar hx2 = Scalar(2) * g.hx, hy2 = Scalar(2) * g.hy;

    MACVelocityT<Scalar> out(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const Scalar fe = Scalar(0.5) * (wu(i, j) + wu(i + 1, j));
            const Scalar fw = Scalar(0.5) * (wu(i - 1, j) + wu(i, j));
            Scalar acc = (fe * xu(i + 1, j) - fw * xu(i - 1, j)) / hx2;
            if (j + 1 < ny) acc += Scalar(0.5) * (wv(i - 1, j + 1) + wv(i, j + 1)) * xu(i, j + 1) / hy2;
            if (j > 0) acc -= Scalar(0.5) * (wv(i - 1, j) + wv(i, j)) * xu(i, j - 1) / hy2;
            out.u(i, j) = acc;
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Scalar fn = Scalar(0.5) * (wv(i, j) + wv(i, j + 1));
            const Scalar fs = Scalar(0.5) * (wv(i, j - 1) + wv(i, j));
            Scalar acc = (fn * xv(i, j + 1) - fs * xv(i, j - 1)) / hy2;
            if (i + 1 < nx) acc += Scalar(0.5) * (wu(i + 1, j - 1) + wu(i + 1, j)) * xv(i + 1, j) / hx2;
            if (i > 0) acc -= Scalar(0.5) * (wu(i, j - 1) + wu(i, j)) * xv(i - 1, j) / hx2;
            out.v(i, j) = acc;
        }
    }
    return out;
}

/// Average of cell values onto faces (one-sided copy on walls).
template <typename Scalar>
MACVelocityT<Scalar> average_to_faces(const ScalarFieldT<Scalar>& f) {
    const Grid& g = f.grid;
    MACVelocityT<Scalar> w(g);
    for (int j = 0; j < g.ny; ++j) {
        w.u(0, j) = f(0, j);
        w.u(g.nx, j) = f(g.nx - 1, j);
        for (int i = 1; i < g.nx; ++i) w.u(i, j) = Scalar(0.5) * (f(i - 1, j) + f(i, j));
    }
    for (int i = 0; i < g.nx; ++i) {
        w.v(i, 0) = f(i, 0);
        w.v(i, g.ny) = f(i, g.ny - 1);
        for (int j = 1; j < g.ny; ++j) w.v(i, j) = Scalar(0.5) * (f(i, j - 1) + f(i, j));
    }
    return w;
}

/// Discrete curl of a streamfunction sampled at grid nodes (x = i*hx, y = j*hy).
/// The result is exactly solenoidal; its boundary normals vanish when psi is
/// zero on the walls.
template <typename F>
MACVelocity velocity_from_streamfunction(const Grid& g, F&& psi) {
    MACVelocity w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            w.u(i, j) = (psi(i * g.hx, (j + 1) * g.hy) - psi(i * g.hx, j * g.hy)) / g.hy;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            w.v(i, j) = -(psi((i + 1) * g.hx, j * g.hy) - psi(i * g.hx, j * g.hy)) / g.hx;
    return w;
}

// ---------------------------------------------------------------------------
// Velocity gradient stencils.  Cell terms are u_x, v_y at cell centres; corner
// terms are u_y, v_x at grid nodes.  On walls the tangential component is
// mirrored with opposite sign, so the wall-node difference is 2u/h and the node
// carries half (quarter at domain corners) of a cell area.  Boundary-normal
// dofs are identically zero and never appear in a stencil.

struct Coef {
    Index dof;
    double value;
};

struct Stencil2 {
    std::array<Coef, 2> c{};
    int n = 0;
    void add(Index dof, double value) { c[n++] = Coef{dof, value}; }

    template <typename Vec>
    double apply(const Vec& x) const {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += c[k].value * double(x[c[k].dof]);
        return s;
    }
};

/// f(i, j, ux, vy) for every cell.
template <typename F>
void for_each_cell_stretch(const Grid& g, F&& f) {
    const FaceLayout L(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            Stencil2 ux, vy;
            if (!L.u_boundary(i + 1)) ux.add(L.u(i + 1, j), 1.0 / g.hx);
            if (!L.u_boundary(i)) ux.add(L.u(i, j), -1.0 / g.hx);
            if (!L.v_boundary(j + 1)) vy.add(L.v(i, j + 1), 1.0 / g.hy);
            if (!L.v_boundary(j)) vy.add(L.v(i, j), -1.0 / g.hy);
            f(i, j, ux, vy);
        }
    }
}

/// f(i, j, node_weight, uy, vx) for every grid node, node_weight in {1, 1/2, 1/4}.
template <typename F>
void for_each_corner_shear(const Grid& g, F&& f) {
    const FaceLayout L(g);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const bool xwall = (i == 0 || i == g.nx);
            const bool ywall = (j == 0 || j == g.ny);
            const double weight = (xwall ? 0.5 : 1.0) * (ywall ? 0.5 : 1.0);
            Stencil2 uy, vx;
            if (!xwall) {
                if (j == 0) uy.add(L.u(i, 0), 2.0 / g.hy);
                else if (j == g.ny) uy.add(L.u(i, g.ny - 1), -2.0 / g.hy);
                else {
                    uy.add(L.u(i, j), 1.0 / g.hy);
                    uy.add(L.u(i, j - 1), -1.0 / g.hy);
                }
            }
            if (!ywall) {
                if (i == 0) vx.add(L.v(0, j), 2.0 / g.hx);
                else if (i == g.nx) vx.add(L.v(g.nx - 1, j), -2.0 / g.hx);
                else {
                    vx.add(L.v(i, j), 1.0 / g.hx);
                    vx.add(L.v(i - 1, j), -1.0 / g.hx);
                }
            }
            f(i, j, weight, uy, vx);
        }
    }
}

/// Cell viscosity averaged to grid nodes over the adjacent cells.
template <typename Scalar>
Array2<Scalar> cell_to_nodes(const ScalarFieldT<Scalar>& f) {
    const Grid& g = f.grid;
    Array2<Scalar> out = Array2<Scalar>::Zero(g.nx + 1, g.ny + 1);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            Scalar s(0);
            int n = 0;
            for (int dj = -1; dj <= 0; ++dj)
                for (int di = -1; di <= 0; ++di) {
                    const int ci = i + di, cj = j + dj;
                    if (ci >= 0 && ci < g.nx && cj >= 0 && cj < g.ny) {
                        s += f(ci, cj);
                        ++n;
                    }
                }
            out(i, j) = s / Scalar(n);
        }
    }
    return out;
}

/// ||grad w||^2 consistent with the no-slip vector Laplacian: equals
/// -<Lap_h w, w> summed over faces.
inline double velocity_dirichlet_energy(const MACVelocity& w) {
    const Grid& g = w.grid;
    const Eigen::VectorXd x = pack(w);
    double cells = 0.0, nodes = 0.0;
    for_each_cell_stretch(g, [&](int, int, const Stencil2& ux, const Stencil2& vy) {
        const double a = ux.apply(x), b = vy.apply(x);
        cells += a * a + b * b;
    });
    for_each_corner_shear(g, [&](int, int, double wt, const Stencil2& uy, const Stencil2& vx) {
        const double a = uy.apply(x), b = vx.apply(x);
        nodes += wt * (a * a + b * b);
    });
    return (cells + nodes) * g.cell_area();
}

/// Sum over the domain of 2 eta |D w|^2 with eta given at cell centres.
inline double viscous_dissipation(const MACVelocity& w, const ScalarField& eta) {
    const Grid& g = w.grid;
    const Eigen::VectorXd x = pack(w);
    const Array2<double> eta_n = cell_to_nodes(eta);
    double total = 0.0;
    for_each_cell_stretch(g, [&](int i, int j, const Stencil2& ux, const Stencil2& vy) {
        const double a = ux.apply(x), b = vy.apply(x);
        total += 2.0 * eta(i, j) * (a * a + b * b);
    });
    for_each_corner_shear(g, [&](int i, int j, double wt, const Stencil2& uy, const Stencil2& vx) {
        const double s = uy.apply(x) + vx.apply(x);
        total += wt * eta_n(i, j) * s * s;
    });
    return total * g.cell_area();
}

// ---------------------------------------------------------------------------
// Quadrature

template <typename Scalar>
Scalar integral(const ScalarFieldT<Scalar>& f) {
    return f.values.sum() * Scalar(f.grid.cell_area());
}

template <typename Scalar>
Scalar mean(const ScalarFieldT<Scalar>& f) {
    return integral(f) / Scalar(f.grid.domain_area());
}

template <typename Scalar>
Scalar inner(const ScalarFieldT<Scalar>& a, const ScalarFieldT<Scalar>& b) {
    require_same_grid(a.grid, b.grid, "inner");
    return (a.values * b.values).sum() * Scalar(a.grid.cell_area());
}

/// Face inner product; every face carries one cell area.
template <typename Scalar>
Scalar inner(const MACVelocityT<Scalar>& a, const MACVelocityT<Scalar>& b) {
    require_same_grid(a.grid, b.grid, "inner");
    return ((a.u * b.u).sum() + (a.v * b.v).sum()) * Scalar(a.grid.cell_area());
}

enum class NormKind { L1, L2, L3, L6, Linf, H1Semi, H2Semi, W23 };

inline NormKind parse_norm_kind(std::string_view s) {
    if (s == "L1") return NormKind::L1;
    if (s == "L2") return NormKind::L2;
    if (s == "L3") return NormKind::L3;
    if (s == "L6") return NormKind::L6;
    if (s == "Linf") return NormKind::Linf;
    if (s == "H1") return NormKind::H1Semi;
    if (s == "H2") return NormKind::H2Semi;
    if (s == "W23") return NormKind::W23;
    throw InvalidArgument("unknown norm kind '" + std::string(s) + "'");
}

namespace detail {

// Second differences with one-sided stencils in the first/last cell.
template <typename Scalar>
Array2<Scalar> second_difference_x(const ScalarFieldT<Scalar>& f) {
    const Grid& g = f.grid;
    Array2<Scalar> d(g.nx, g.ny);
    const Scalar ih2 = Scalar(1) / (g.hx * g.hx);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int c = std::clamp(i, 1, g.nx - 2);
            d(i, j) = (f(c + 1, j) - Scalar(2) * f(c, j) + f(c - 1, j)) * ih2;
        }
    return d;
}

template <typename Scalar>
Array2<Scalar> second_difference_y(const ScalarFieldT<Scalar>& f) {
    const Grid& g = f.grid;
    Array2<Scalar> d(g.nx, g.ny);
    const Scalar ih2 = Scalar(1) / (g.hy * g.hy);
    for (int j = 0; j < g.ny; ++j) {
        const int c = std::clamp(j, 1, g.ny - 2);
        for (int i = 0; i < g.nx; ++i) d(i, j) = (f(i, c + 1) - Scalar(2) * f(i, c) + f(i, c - 1)) * ih2;
    }
    return d;
}

template <typename Scalar>
Array2<Scalar> first_difference(const Array2<Scalar>& a, double h, bool along_x) {
    Array2<Scalar> d(a.rows(), a.cols());
    const Index n = along_x ? a.rows() : a.cols();
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) {
            const Index k = along_x ? i : j;
            auto at = [&](Index m) { return along_x ? a(m, j) : a(i, m); };
            if (k == 0) d(i, j) = (at(1) - at(0)) / h;
            else if (k == n - 1) d(i, j) = (at(n - 1) - at(n - 2)) / h;
            else d(i, j) = (at(k + 1) - at(k - 1)) / (2.0 * h);
        }
    return d;
}

template <typename Scalar>
Array2<Scalar> mixed_difference(const ScalarFieldT<Scalar>& f) {
    const Grid& g = f.grid;
    return first_difference<Scalar>(first_difference<Scalar>(f.values, g.hx, true), g.hy, false);
}

}  // namespace detail

template <typename Scalar>
Scalar norm(const ScalarFieldT<Scalar>& f, NormKind kind) {
    const Scalar area = Scalar(f.grid.cell_area());
    using std::pow;
    using std::sqrt;
    switch (kind) {
        case NormKind::L1: return f.values.abs().sum() * area;
        case NormKind::L2: return sqrt(f.values.square().sum() * area);
        case NormKind::L3: return pow(f.values.abs().cube().sum() * area, Scalar(1) / Scalar(3));
        case NormKind::L6: return pow(f.values.square().cube().sum() * area, Scalar(1) / Scalar(6));
        case NormKind::Linf: return f.values.abs().maxCoeff();
        case NormKind::H1Semi: {
            const auto w = gradient_to_faces(f);
            return sqrt(inner(w, w));
        }
        case NormKind::H2Semi: {
            const auto xx = detail::second_difference_x(f);
            const auto yy = detail::second_difference_y(f);
            const auto xy = detail::mixed_difference(f);
            return sqrt((xx.square() + yy.square() + Scalar(2) * xy.square()).sum() * area);
        }
        case NormKind::W23: {
            const auto xx = detail::second_difference_x(f);
            const auto yy = detail::second_difference_y(f);
            const auto xy = detail::mixed_difference(f);
            return pow((xx.abs().cube() + yy.abs().cube() + Scalar(2) * xy.abs().cube()).sum() * area,
                       Scalar(1) / Scalar(3));
        }
    }
    throw InvalidArgument("norm: unknown kind");
}

inline double norm(const MACVelocity& w, NormKind kind) {
    switch (kind) {
        case NormKind::L2: return std::sqrt(inner(w, w));
        case NormKind::Linf: return std::max(w.u.abs().maxCoeff(), w.v.abs().maxCoeff());
        case NormKind::H1Semi: return std::sqrt(velocity_dirichlet_energy(w));
        default: throw InvalidArgument("norm: kind not defined for face fields");
    }
}

/// Full H^1 and H^2 norms built from the seminorms above.
inline double norm_h1(const ScalarField& f) {
    const double a = norm(f, NormKind::L2), b = norm(f, NormKind::H1Semi);
    return std::sqrt(a * a + b * b);
}

inline double norm_h2(const ScalarField& f) {
    const double a = norm(f, NormKind::L2), b = norm(f, NormKind::H1Semi), c = norm(f, NormKind::H2Semi);
    return std::sqrt(a * a + b * b + c * c);
}

}  // namespace chns
