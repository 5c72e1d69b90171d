#pragma once

#include <iosfwd>

#include "gdl/config.hpp"
#include "gdl/data.hpp"
#include "gdl/optimizer.hpp"

namespace gdl {

struct TrainResult {
    ModelParams last;
    ModelParams best;  // best-validation checkpoint (equals last if never validated)
    double best_val_psnr = -1.0;
    long best_step = -1;
    double final_loss = 0.0;
};

/// Minibatch training, deterministic given the config seed: sample identity,
/// crop, augmentation, noise level and noise field are all pure functions of
/// (seed, global sample index); gradients accumulate in batch order; banks
/// are re-realized from current parameters at the top of every step.
/// Validation PSNR on val_set (at the midpoint sigma) every val_every steps;
/// the best checkpoint is retained. Log lines: step=, loss=, lr=, wall_ms=,
/// and val_psnr= on validation steps.
TrainResult train(const RunConfig& cfg, const Dataset& train_set, const Dataset& val_set,
                  std::ostream* log);

}  // namespace gdl
