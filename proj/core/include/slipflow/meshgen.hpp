#pragma once

#include "slipflow/mesh.hpp"

namespace slipflow {

/// Fluid reference cell Y* = Y \ Y_S, fully periodic in both directions.
/// Boundary nodes are uniformly spaced (the same layout on opposite sides),
/// the inclusion boundary is sampled at arc length <= h/2, and the interior
/// is a quality-refined constrained Delaunay triangulation of size <= h.
PeriodicMesh build_cell_mesh(const InclusionSpec& inclusion, double h);

/// Truncated boundary-layer strip [0,1] x (-n_pore_layers, top_height):
/// n_pore_layers translated copies of the cell template below the interface
/// S (y=0), a graded structured block above.  Periodic in y1 only; pore
/// boundaries and the bottom cut carry Dirichlet tags, the top cut is left
/// to the caller (tagged `top`), S is tagged and resolved by edges.
/// Pore rows are labeled as layer bands -1..-n, structured rows 1,2,...
PeriodicMesh build_strip_mesh(const InclusionSpec& inclusion, int n_pore_layers,
                              double top_height, double h);

/// Epsilon-periodic composite domain: free block (0,L)x(0,h_free) over the
/// pore block (0,L)x(-K_depth,0) with eps-scaled inclusions.  Requires
/// L/eps and K_depth/eps integral.  Periodic in x1; all outer walls tagged
/// for no-slip (top, bottom, pore); Sigma tagged at y=0.
PeriodicMesh build_eps_mesh(const InclusionSpec& inclusion, double eps, double L,
                            double h_free, double K_depth,
                            int elems_per_pore_diameter, double h_macro);

/// Uniform right-triangle rectangle mesh (0,L) x (y0,y1), periodic in x.
/// The horizontal boundaries receive the given tags (interface_s for the
/// side that represents Sigma).
PeriodicMesh build_rect_mesh(double L, double y0, double y1, double h,
                             BTag bottom_tag, BTag top_tag);

}  // namespace slipflow
