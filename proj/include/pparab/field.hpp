#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pparab {

/// Uniform node lattice x_i = x0 + i*hx, y_j = y0 + j*hy.
struct Grid2 {
    int nx = 3;
    int ny = 3;
    double hx = 1.0;
    double hy = 1.0;
    double x0 = 0.0;
    double y0 = 0.0;

    double x(int i) const { return x0 + i * hx; }
    double y(int j) const { return y0 + j * hy; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    bool interior(int i, int j) const { return i > 0 && j > 0 && i < nx - 1 && j < ny - 1; }

    bool operator==(const Grid2&) const = default;
};

/// Throws RangeError on nx, ny < 3 or non-positive spacing.
Grid2 validate(const Grid2& grid);

/// nx-by-ny nodes spanning [ax,bx] x [ay,by] inclusive.
Grid2 make_grid(int nx, int ny, double ax, double bx, double ay, double by);

/// One time slice. Node (i,j) lives at values[j*nx + i].
struct ScalarField {
    Grid2 grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid2& g, double fill = 0.0);

    double& at(int i, int j) { return values[index(i, j)]; }
    double at(int i, int j) const { return values[index(i, j)]; }
    std::size_t index(int i, int j) const
    {
        return static_cast<std::size_t>(j) * grid.nx + static_cast<std::size_t>(i);
    }
};

ScalarField sample(const Grid2& grid, const std::function<double(double, double)>& f);

// CSV: "nx,ny,hx,hy,x0,y0" header, one line of those values, then ny rows of nx values.
void write_csv(std::ostream& os, const ScalarField& field);
ScalarField read_csv(std::istream& is);
void write_csv(const std::string& path, const ScalarField& field);
ScalarField read_csv(const std::string& path);

} // namespace pparab
