#include "calibra/gallery.hpp"

namespace calibra {

GraphMap GalleryEntry::make(std::vector<double> params) const {
  return make_builtin(name, 0, 0, std::move(params));
}

const std::vector<GalleryEntry>& gallery_entries() {
  static const std::vector<GalleryEntry> entries = {
      {"linear", "affine map x -> A x (params: row-major m x n matrix, default identity)",
       true,
       "flat graph; singular values of A; minimal graph system holds identically; "
       "certified wherever the two-dilation condition on A holds",
       2, 2, "[-1, 1]^n"},
      {"holomorphic_square", "s * ((x1^2 - x2^2)/2, x1 x2), one scale parameter s",
       true,
       "conformal: lambda_1 = lambda_2 = s |x|; minimal (graph of a holomorphic map); "
       "calibrated_crude where s^2 |x|^2 <= 1",
       2, 2, "[-1, 1]^2"},
      {"scherk", "log cos x1 - log cos x2", true,
       "classical minimal graph; rank 2 away from the axes; "
       "lambda from sec^2 tangents; certified near the origin",
       2, 1, "(-pi/2, pi/2)^2"},
      {"paraboloid", "x1^2 + x2^2 (non-minimal distractor)", false,
       "mean curvature nonzero away from 0; minimal-graph residual and dTheta "
       "both bounded away from zero; verdict not_minimal",
       2, 1, "[-1, 1]^2"},
  };
  return entries;
}

const GalleryEntry& gallery_entry(const std::string& name) {
  for (const auto& e : gallery_entries())
    if (e.name == name) return e;
  throw SpecError("unknown gallery map '" + name + "'");
}

}  // namespace calibra
