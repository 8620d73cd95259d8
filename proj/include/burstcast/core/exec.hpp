#pragma once

namespace burstcast {

/// Selects between the OpenMP kernels and the plain-loop reference path.
/// Both paths reduce in the same fixed order, so results are bit-identical.
enum class Exec { serial, parallel };

}  // namespace burstcast
