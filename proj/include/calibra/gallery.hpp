#pragma once

#include <string>
#include <vector>

#include "calibra/maps.hpp"

namespace calibra {

/// Curated reference map with its analytic expectations.
struct GalleryEntry {
  std::string name;
  std::string summary;
  bool is_minimal = false;
  /// expected singular-value structure and verdicts, for humans
  std::string notes;
  int n = 0;
  int m = 0;
  std::string domain_text;

  GraphMap make(std::vector<double> params = {}) const;
};

const std::vector<GalleryEntry>& gallery_entries();

/// Entry by name; throws SpecError for unknown names.
const GalleryEntry& gallery_entry(const std::string& name);

}  // namespace calibra
