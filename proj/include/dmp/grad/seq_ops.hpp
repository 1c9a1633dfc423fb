#pragma once

#include <vector>

#include "dmp/exec.hpp"
#include "dmp/grad/tape.hpp"

namespace dmp::grad {

// Ops over batched sequences laid out per SeqLayout.

// rows x (T*B) -> rows x B, mean over the T frames of each clip.
Var segment_mean(Var x, SeqLayout layout);

// 1 x (T*B) scores -> softmax over the frames of each clip.
Var segment_softmax(Var scores, SeqLayout layout);

// Equal weights 1/T per frame; no gradient path.
Matrix uniform_attention(SeqLayout layout);

// sum_t alpha(t, b) * h(:, t, b) -> d x B.
Var attention_pool(Var h, Var alpha, SeqLayout layout);

// Frobenius norm of each (block_rows x T) slab per clip: returns
// (rows / block_rows) x B. The gradient at a zero slab is taken as zero.
Var block_frobenius(Var x, Eigen::Index block_rows, SeqLayout layout);

// Gathers the listed rows, in order.
Var select_rows(Var x, const std::vector<Eigen::Index>& rows);

}  // namespace dmp::grad
