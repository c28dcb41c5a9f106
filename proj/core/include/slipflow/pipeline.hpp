#pragma once

#include <string>
#include <vector>

#include "slipflow/config.hpp"

namespace slipflow {

/// Stage names in dependency order.  Config dependencies (cache keys):
///   transform : curve
///   cell      : curve, inclusion, box, discretization, sampling
///   u0        : curve, box, force, discretization, sampling
///   bl        : u0 + inclusion, strip, discretization  (+ deep-strip flag)
///   effective : cell + bl + sweep (first eps)
///   dns       : curve, inclusion, box, force, discretization, sweep (first eps)
///   sweep     : effective inputs + sweep (all eps)
/// Changing a config field re-runs exactly the stages whose key contains it.
struct PipelineOptions {
    std::string out_dir = "out";
    int jobs = 1;
    bool deep_strip = false;  ///< double the strip truncation depth
    bool fine = false;        ///< halve every mesh size
};

struct StageResult {
    std::string name;
    bool cached = false;
    std::vector<std::string> outputs;
};

/// Run the named stages (upstream dependencies are pulled in automatically);
/// an empty list means the full pipeline.  Stage outputs are CSV/text files
/// under out_dir; a manifest records content hashes so unchanged stages are
/// skipped with byte-identical outputs left in place.
std::vector<StageResult> run_pipeline(const WorkbenchConfig& config,
                                      const PipelineOptions& options,
                                      std::vector<std::string> stages = {});

/// Emit per-figure plain-text plot data (decay curves, coefficient profiles,
/// eps-convergence log-log series) from a completed artifact directory.
/// Throws ConfigError naming the missing stage output if incomplete.
std::vector<std::string> export_plots(const std::string& artifact_dir);

}  // namespace slipflow
