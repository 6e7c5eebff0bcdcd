#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "atlaspaint/compose.hpp"
#include "atlaspaint/synthetic.hpp"

namespace testing_support {

// Synthetic atlas written under `dir` and loaded, with a job over `csv`.
atlaspaint::RenderJob synthetic_job(const std::filesystem::path& dir, int width, int height,
                                    const atlaspaint::SyntheticAtlasOptions& options = {},
                                    const std::string& csv = atlaspaint::synthetic_biomarker_csv());

}  // namespace testing_support
