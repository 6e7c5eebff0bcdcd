#include "support/fixtures.hpp"

#include "atlaspaint/atlas.hpp"
#include "atlaspaint/biomarker.hpp"

namespace testing_support {

atlaspaint::RenderJob synthetic_job(const std::filesystem::path& dir, int width, int height,
                                    const atlaspaint::SyntheticAtlasOptions& options, const std::string& csv) {
  using namespace atlaspaint;
  const auto manifest_path = write_synthetic_atlas(dir, options);
  auto atlas = std::make_shared<const LoadedAtlas>(load_atlas(load_manifest(manifest_path)));
  RenderJob job;
  job.table = parse_biomarker_csv(csv, atlas->manifest, CsvOptions{});
  job.atlas = std::move(atlas);
  job.views = {View::CorticalOuterLeft, View::Top};
  job.width = width;
  job.height = height;
  job.out_dir = dir / "out";
  return job;
}

}  // namespace testing_support
