#include "rhsradar/surface.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rhsradar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Matrix3Xd grid_positions(int rows, int cols, double spacing) {
    Eigen::Matrix3Xd positions(3, static_cast<Eigen::Index>(rows) * cols);
    const double x0 = -0.5 * (cols - 1) * spacing;
    const double y0 = -0.5 * (rows - 1) * spacing;
    Eigen::Index n = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c, ++n) {
            positions.col(n) << x0 + c * spacing, y0 + r * spacing, 0.0;
        }
    }
    return positions;
}

void check_grid_args(int rows, int cols, double spacing) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("build_planar_surface: element counts must be positive");
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw std::invalid_argument("build_planar_surface: spacing must be positive and finite");
    }
}

} // namespace

RealMatrix SurfaceGeometry::feed_element_distances() const {
    RealMatrix distances(n_elements(), n_feeds());
    for (Eigen::Index l = 0; l < n_feeds(); ++l) {
        for (Eigen::Index n = 0; n < n_elements(); ++n) {
            distances(n, l) = (element_positions.col(n) - feed_positions.col(l)).norm();
        }
    }
    return distances;
}

SurfaceGeometry build_planar_surface(int rows, int cols, double spacing, int n_feeds,
                                     FeedLayout layout) {
    check_grid_args(rows, cols, spacing);
    if (n_feeds < 1) {
        throw std::invalid_argument("build_planar_surface: at least one feed required");
    }

    SurfaceGeometry geom;
    geom.element_positions = grid_positions(rows, cols, spacing);
    geom.element_spacing = spacing;

    const double x_min = geom.element_positions.row(0).minCoeff();
    const double x_max = geom.element_positions.row(0).maxCoeff();
    const double y_min = geom.element_positions.row(1).minCoeff();
    const double feed_y = layout == FeedLayout::edge ? y_min - spacing : 0.0;

    geom.feed_positions.resize(3, n_feeds);
    for (int f = 0; f < n_feeds; ++f) {
        // Corner-anchored equal spacing along the edge. Anchoring at one end
        // keeps the feed line off the aperture's mirror axis, so the surface
        // has no exact left/right symmetry: a symmetric feed would make
        // mirror-image target constellations produce identical single-feed
        // measurements and leave them undecidable before any optimization.
        const double t = static_cast<double>(f) / n_feeds;
        geom.feed_positions.col(f) << x_min + t * (x_max - x_min), feed_y, 0.0;
    }
    return geom;
}

SurfaceGeometry build_planar_surface(int rows, int cols, double spacing,
                                     const Eigen::Matrix3Xd& feed_positions) {
    check_grid_args(rows, cols, spacing);
    if (feed_positions.cols() < 1) {
        throw std::invalid_argument("build_planar_surface: at least one feed required");
    }
    SurfaceGeometry geom;
    geom.element_positions = grid_positions(rows, cols, spacing);
    geom.element_spacing = spacing;
    geom.feed_positions = feed_positions;
    return geom;
}

PropagationModel propagation_matrices(const SurfaceGeometry& geometry, double refractive_index,
                                      double attenuation_factor, double wavelength) {
    if (!(refractive_index > 0.0) || !std::isfinite(refractive_index)) {
        throw std::invalid_argument("propagation_matrices: refractive index must be positive");
    }
    if (!(attenuation_factor >= 0.0) || !std::isfinite(attenuation_factor)) {
        throw std::invalid_argument("propagation_matrices: attenuation factor must be non-negative");
    }
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
        throw std::invalid_argument("propagation_matrices: wavelength must be positive");
    }

    const RealMatrix distances = geometry.feed_element_distances();
    PropagationModel model;
    model.refractive_index = refractive_index;
    model.attenuation_factor = attenuation_factor;
    model.wavelength = wavelength;
    model.phase.resize(distances.rows(), distances.cols());
    model.attenuation.resize(distances.rows(), distances.cols());
    for (Eigen::Index l = 0; l < distances.cols(); ++l) {
        for (Eigen::Index n = 0; n < distances.rows(); ++n) {
            const double d = distances(n, l);
            model.phase(n, l) = std::polar(1.0, -kTwoPi * refractive_index * d / wavelength);
            model.attenuation(n, l) = std::exp(-attenuation_factor * d);
        }
    }
    return model;
}

ComplexVector steering_vector(const SurfaceGeometry& geometry, const Direction& direction,
                              double wavelength) {
    const double sin_polar = std::sin(direction.polar);
    const Eigen::Vector3d wave_direction(sin_polar * std::cos(direction.azimuth),
                                         sin_polar * std::sin(direction.azimuth),
                                         std::cos(direction.polar));
    const double wave_number = kTwoPi / wavelength;

    ComplexVector steer(geometry.n_elements());
    for (Eigen::Index n = 0; n < geometry.n_elements(); ++n) {
        steer(n) = std::polar(1.0, wave_number * geometry.element_positions.col(n).dot(wave_direction));
    }
    return steer;
}

} // namespace rhsradar
