#ifndef RHSRADAR_SURFACE_HPP
#define RHSRADAR_SURFACE_HPP

#include "rhsradar/numerics.hpp"

#include <Eigen/Dense>

namespace rhsradar {

/// Far-field arrival direction. Azimuth in [0, 2*pi), polar in [0, pi/2].
struct Direction {
    double azimuth = 0.0;
    double polar = 0.0;
};

/// Placement rule for feeds relative to the element grid.
enum class FeedLayout {
    edge,     // evenly spaced along the bottom edge, one spacing below the grid
    centered, // evenly spaced along the grid's central row
};

/**
 * Element and feed layout of one antenna surface. Elements sit on a centered
 * planar grid in the z = 0 plane; feeds lie in the same plane.
 */
struct SurfaceGeometry {
    Eigen::Matrix3Xd element_positions; // meters, one column per element
    Eigen::Matrix3Xd feed_positions;    // meters, one column per feed
    double element_spacing = 0.0;       // meters

    Eigen::Index n_elements() const { return element_positions.cols(); }
    Eigen::Index n_feeds() const { return feed_positions.cols(); }

    /// Euclidean feed-to-element distances, n_elements x n_feeds.
    RealMatrix feed_element_distances() const;
};

/**
 * Per-path waveguide propagation from each feed to each element:
 * phase entries exp(-j 2 pi nu D / lambda) and attenuation exp(-alpha D).
 */
struct PropagationModel {
    ComplexMatrix phase;     // N x L, unit modulus
    RealMatrix attenuation;  // N x L, in (0, 1]
    double refractive_index = 1.0;
    double attenuation_factor = 0.0; // 1/meter
    double wavelength = 0.0;         // meters

    /// Elementwise phase * attenuation, the per-path transfer matrix.
    ComplexMatrix transfer() const { return phase.cwiseProduct(attenuation.cast<Complex>()); }
};

/// Builds a rows x cols planar surface with feeds placed per the given rule.
SurfaceGeometry build_planar_surface(int rows, int cols, double spacing, int n_feeds,
                                     FeedLayout layout = FeedLayout::edge);

/// Same grid with explicitly positioned feeds.
SurfaceGeometry build_planar_surface(int rows, int cols, double spacing,
                                     const Eigen::Matrix3Xd& feed_positions);

/// Evaluates the propagation phase/attenuation matrices for a surface.
PropagationModel propagation_matrices(const SurfaceGeometry& geometry, double refractive_index,
                                      double attenuation_factor, double wavelength);

/// Far-field plane-wave steering vector: entry n is
/// exp(j (2 pi / lambda) <p_n, k(theta, phi)>) with
/// k = (sin phi cos theta, sin phi sin theta, cos phi).
ComplexVector steering_vector(const SurfaceGeometry& geometry, const Direction& direction,
                              double wavelength);

} // namespace rhsradar

#endif
