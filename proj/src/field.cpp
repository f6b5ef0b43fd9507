#include "pparab/field.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "pparab/errors.hpp"

namespace pparab {

Grid2 validate(const Grid2& grid)
{
    if (grid.nx < 3)
        throw RangeError("nx", "nx < 3: grid has no interior");
    if (grid.ny < 3)
        throw RangeError("ny", "ny < 3: grid has no interior");
    if (!(grid.hx > 0.0) || !std::isfinite(grid.hx))
        throw RangeError("hx", "hx must be positive");
    if (!(grid.hy > 0.0) || !std::isfinite(grid.hy))
        throw RangeError("hy", "hy must be positive");
    return grid;
}

Grid2 make_grid(int nx, int ny, double ax, double bx, double ay, double by)
{
    Grid2 g;
    g.nx = nx;
    g.ny = ny;
    g.hx = (bx - ax) / (nx - 1);
    g.hy = (by - ay) / (ny - 1);
    g.x0 = ax;
    g.y0 = ay;
    return validate(g);
}

ScalarField::ScalarField(const Grid2& g, double fill) : grid(validate(g)), values(g.size(), fill) {}

ScalarField sample(const Grid2& grid, const std::function<double(double, double)>& f)
{
    ScalarField out(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            out.at(i, j) = f(grid.x(i), grid.y(j));
    return out;
}

void write_csv(std::ostream& os, const ScalarField& field)
{
    const Grid2& g = field.grid;
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << "nx,ny,hx,hy,x0,y0\n";
    os << g.nx << ',' << g.ny << ',' << g.hx << ',' << g.hy << ',' << g.x0 << ',' << g.y0 << '\n';
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i)
                os << ',';
            os << field.at(i, j);
        }
        os << '\n';
    }
}

namespace {

std::vector<double> split_numbers(const std::string& line)
{
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw IoError("malformed CSV cell '" + cell + "'");
        }
    }
    return out;
}

} // namespace

ScalarField read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("nx,ny,hx,hy,x0,y0", 0) != 0)
        throw IoError("missing CSV header nx,ny,hx,hy,x0,y0");
    if (!std::getline(is, line))
        throw IoError("missing grid line");
    auto head = split_numbers(line);
    if (head.size() != 6)
        throw IoError("grid line must have 6 entries");
    Grid2 g{static_cast<int>(head[0]), static_cast<int>(head[1]), head[2], head[3], head[4], head[5]};
    ScalarField field(g);
    for (int j = 0; j < g.ny; ++j) {
        if (!std::getline(is, line))
            throw IoError("CSV ended before row " + std::to_string(j));
        auto row = split_numbers(line);
        if (static_cast<int>(row.size()) != g.nx)
            throw IoError("row " + std::to_string(j) + " has wrong length");
        for (int i = 0; i < g.nx; ++i) {
            if (!std::isfinite(row[i]))
                throw IoError("non-finite value in CSV");
            field.at(i, j) = row[i];
        }
    }
    return field;
}

void write_csv(const std::string& path, const ScalarField& field)
{
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open " + path + " for writing");
    write_csv(os, field);
    if (!os)
        throw IoError("write failed: " + path);
}

ScalarField read_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open " + path);
    return read_csv(is);
}

} // namespace pparab
