// Regenerates the synthetic example data shipped under data/:
//   <out>/synthetic/      split atlas, biomarkers.csv, config.json
//   <out>/synthetic-raw/  unsplit atlas for prep-atlas
#include <filesystem>
#include <iostream>

#include "atlaspaint/error.hpp"
#include "atlaspaint/mesh.hpp"
#include "atlaspaint/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc > 2) {
    std::cerr << "usage: make_synthetic_atlas [OUT_DIR]\n";
    return 64;
  }
  const std::filesystem::path out = argc == 2 ? argv[1] : "data";
  try {
    const auto split = out / "synthetic";
    std::cout << atlaspaint::write_synthetic_atlas(split).string() << '\n';
    atlaspaint::write_file(split / "biomarkers.csv", atlaspaint::synthetic_biomarker_csv());
    atlaspaint::write_file(split / "config.json", R"({
  "atlas": "manifest.json",
  "input_csv": "biomarkers.csv",
  "views": ["outer-left", "outer-right", "subcortical", "top"],
  "resolution": [400, 300],
  "shell_alpha": 0.25,
  "out_dir": "out"
}
)");
    std::cout << atlaspaint::write_synthetic_raw_atlas(out / "synthetic-raw").string() << '\n';
  } catch (const atlaspaint::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return atlaspaint::is_io_error(e.code()) ? 2 : 1;
  }
  return 0;
}
