#pragma once

// Batched field kernels used by the training engine. They perform exactly
// the same arithmetic in exactly the same order as the public per-coordinate
// sample/backward functions, restructured (channel, rank) outermost so each
// plane slice stays cache-resident across a whole pixel batch. Not installed.

#include <span>

#include "trivol/field.hpp"

namespace trivol::detail {

// feats: [channels][n] accumulator layout, overwritten.
// triples: optional cache, [(c*rank + r)*n + px][3] per-plane values.
void batched_forward(const TriPlanarField& f, std::span<const CellIndex> cells, double* feats,
                     double* triples);
void batched_forward(const CPField& f, std::span<const CellIndex> cells, double* feats,
                     double* triples);

// upstream: [channels][n] dL/dfeature. triples must come from batched_forward.
void batched_backward_params(const TriPlanarField& f, std::span<const CellIndex> cells,
                             const double* upstream, const double* triples, FieldGradients& grads);
void batched_backward_params(const CPField& f, std::span<const CellIndex> cells,
                             const double* upstream, const double* triples, FieldGradients& grads);

// Accumulates dL/dcoord into coord_grads ([n][3], caller-zeroed).
void batched_backward_coords(const TriPlanarField& f, std::span<const CellIndex> cells,
                             const double* upstream, double* coord_grads);
void batched_backward_coords(const CPField& f, std::span<const CellIndex> cells,
                             const double* upstream, double* coord_grads);

}  // namespace trivol::detail
