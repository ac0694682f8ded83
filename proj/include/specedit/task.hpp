#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specedit/denoiser.hpp"
#include "specedit/grid.hpp"
#include "specedit/token_set.hpp"

namespace specedit {

enum class MaskShape { Rect, Disk, MultiBlob };
enum class EditKind { Recolor, TexturePhase, MeanShift };
enum class TaskKind { Synthetic, Adversarial };

struct TaskParams {
    std::uint64_t seed = 7;
    std::size_t height = 256;
    std::size_t width = 256;
    std::size_t channels = 4;
    TaskKind kind = TaskKind::Synthetic;
    MaskShape mask = MaskShape::Rect;
    int blobs = 3;
    double mask_fraction = 0.1;
    EditKind edit = EditKind::MeanShift;
    double delta = 1.5;
    double strength = 1.0;
    double prior_var = 0.05;  // per-element data variance v
};

/// Synthetic edit with ground truth. z_ori is base_mean plus sqrt(v) noise; the
/// coarse truth mask marks tokens with at least half of their fine pixels edited.
struct SyntheticTask {
    TaskParams params;
    EditCondition condition;
    LatentGrid z_ori;
    LatentGrid target;                   // mu(c) at full resolution
    std::vector<std::uint8_t> fine_mask;  // H*W
    // Footprint of the coarse tokens the edit touches (H*W). Quality metrics use this
    // token-aligned region so that refining a token can never increase its error.
    std::vector<std::uint8_t> edit_region;
    TokenSet truth;                       // coarse (H/4 x W/4)
    double fine_fraction = 0.0;
};

const char* mask_shape_name(MaskShape m);
const char* edit_kind_name(EditKind e);

SyntheticTask generate_task(const TaskParams& params);

/// Flat square recolor placed on a checkerboard of 2x2 cells, with a one-pixel
/// flat moat so every Sobel window inside the true mask sees a constant field.
/// The square is aligned to 16-pixel blocks and covers `side` pixels per edge.
SyntheticTask make_adversarial_task(const TaskParams& params, std::size_t side = 0);

/// Coarse tokens whose 4x4 footprint is at least half inside the fine mask.
TokenSet coarse_truth_mask(const std::vector<std::uint8_t>& fine_mask, std::size_t height, std::size_t width);

}  // namespace specedit
