#include <algorithm>
#include <set>

#include "doctest.h"

#include "atlaspaint/compose.hpp"
#include "atlaspaint/gif.hpp"
#include "atlaspaint/mesh.hpp"
#include "support/fixtures.hpp"
#include "support/gif_reader.hpp"
#include "support/png_reader.hpp"
#include "support/temp_dir.hpp"

using namespace atlaspaint;
using testing_support::synthetic_job;
using testing_support::TempDir;

namespace {

std::set<std::string> scene_ids(const RenderJob& job, const std::vector<SceneItem>& items) {
  std::set<std::string> ids;
  for (const SceneItem& item : items) {
    for (std::size_t i = 0; i < job.atlas->meshes.size(); ++i) {
      if (job.atlas->meshes[i] == item.mesh) ids.insert(job.atlas->manifest.regions[i].region_id);
    }
  }
  return ids;
}

bool cell_equals(const Image& montage, const Image& cell, int x0, int y0) {
  for (int y = 0; y < cell.height; ++y) {
    for (int x = 0; x < cell.width; ++x) {
      if (montage.at(x0 + x, y0 + y) != cell.at(x, y)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("compose") {
  TEST_CASE("scene selection per view") {
    TempDir dir;
    RenderJob job = synthetic_job(dir.path(), 64, 48);
    const auto& stage = job.table.stages[0];

    const auto left = scene_ids(job, build_scene(job, stage, View::CorticalOuterLeft));
    CHECK(left.size() == 7);
    CHECK(std::all_of(left.begin(), left.end(), [](const std::string& id) { return id.ends_with("-lh"); }));
    const auto right = scene_ids(job, build_scene(job, stage, View::CorticalInnerRight));
    CHECK(std::all_of(right.begin(), right.end(), [](const std::string& id) { return id.ends_with("-rh"); }));
    CHECK(scene_ids(job, build_scene(job, stage, View::Top)).size() == 14);

    // Subcortical view: only subcortical entries while the shell is hidden.
    const auto deep = build_scene(job, stage, View::Subcortical);
    CHECK(scene_ids(job, deep) == std::set<std::string>{"hippocampus-lh", "hippocampus-rh", "thalamus-lh", "thalamus-rh"});
    job.shell_alpha = 0.3;
    const auto shelled = build_scene(job, stage, View::Subcortical);
    CHECK(shelled.size() == 14);
    for (const SceneItem& item : shelled) {
      const bool deep_item = std::any_of(deep.begin(), deep.end(), [&](const SceneItem& d) { return d.mesh == item.mesh; });
      CHECK(item.material.alpha == doctest::Approx(deep_item ? 1.0 : 0.3));
    }
    CHECK_THROWS_AS(build_scene(job, "nope", View::Top), Error);
  }

  TEST_CASE("colors follow the table") {
    TempDir dir;
    RenderJob job = synthetic_job(dir.path(), 64, 48);
    const auto items = build_scene(job, "stage4", View::Top);
    for (std::size_t i = 0; i < job.atlas->meshes.size(); ++i) {
      for (const SceneItem& item : items) {
        if (item.mesh == job.atlas->meshes[i]) CHECK(item.material.base_color == value_to_color(job.table.values[3][i], job.gradient));
      }
    }
  }

  TEST_CASE("output naming") {
    CHECK(output_name("render", "stage2", View::CorticalOuterLeft) == "render_stage2_cortical-outer-left.png");
    CHECK(output_name("x", "s", View::Top) == "x_s_top.png");
  }

  TEST_CASE("render_job writes one PNG per stage and view") {
    TempDir dir;
    RenderJob job = synthetic_job(dir.path(), 40, 30);
    const JobOutput out = render_job(job);
    CHECK(out.failures.empty());
    REQUIRE(out.files.size() == 8);
    CHECK(out.files[0].filename() == "render_stage1_cortical-outer-left.png");
    CHECK(out.files[1].filename() == "render_stage1_top.png");
    const auto decoded = testing_support::decode_png(read_file(out.files[7]));
    CHECK(decoded.width == 40);
    CHECK(decoded.height == 30);
    CHECK(decoded.rgba == to_image(render_stage(job, 3, View::Top)).rgba);
  }

  TEST_CASE("an unsupported view does not stop the others") {
    TempDir dir;
    SyntheticAtlasOptions options;
    options.hollow = true;
    RenderJob job = synthetic_job(dir.path(), 32, 24, options);
    CHECK(supported_views(job.atlas->manifest).size() == all_views().size() - 2);
    job.views = {View::CorticalInnerLeft, View::Top};
    const JobOutput out = render_job(job);
    REQUIRE(out.failures.size() == 1);
    CHECK(out.failures[0].view == View::CorticalInnerLeft);
    CHECK(out.failures[0].code == ErrorCode::UnsupportedView);
    CHECK(out.files.size() == 4);
    for (const auto& f : out.files) CHECK(std::filesystem::exists(f));
    try {
      build_scene(job, "stage1", View::CorticalInnerRight);
      FAIL("expected UnsupportedView");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedView);
    }
  }

  TEST_CASE("montage layout") {
    TempDir dir;
    const std::string csv = "Image-name-unique,hippocampus,frontal-rh\na,1,0\nb,3,2\n";
    RenderJob job = synthetic_job(dir.path(), 100, 80, {}, csv);
    const Image montage = render_montage(job, 8);
    CHECK(montage.width == 224);
    CHECK(montage.height == 184);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        const Image cell = to_image(render_stage(job, c, job.views[r]));
        CHECK(cell_equals(montage, cell, 8 + c * 108, 8 + r * 88));
      }
    }
    // Gutters are background.
    CHECK(montage.at(0, 0) == std::array<std::uint8_t, 4>{255, 255, 255, 255});
    CHECK(montage.at(110, 50) == std::array<std::uint8_t, 4>{255, 255, 255, 255});
    CHECK(montage.at(223, 183) == std::array<std::uint8_t, 4>{255, 255, 255, 255});

    job.views = {View::Top};
    job.table.stages.resize(1);
    job.table.values.resize(1);
    CHECK(render_montage(job, 0) == to_image(render_stage(job, 0, View::Top)));
    CHECK_THROWS_AS(render_montage(job, -1), Error);
  }

  TEST_CASE("animation frames") {
    TempDir dir;
    RenderJob job = synthetic_job(dir.path(), 32, 24);
    const auto frames = animation_frames(job, View::Top, 3);
    REQUIRE(frames.size() == 10);
    for (std::size_t s = 0; s < 4; ++s) CHECK(frames[s * 3] == render_stage(job, s, View::Top));
    CHECK(frames[1] != frames[0]);

    const std::string flat = "Image-name-unique,hippocampus\na,2\nb,2\n";
    RenderJob same = synthetic_job(dir.path() / "flat", 32, 24, {}, flat);
    const auto still = animation_frames(same, View::Top, 4);
    REQUIRE(still.size() == 5);
    for (const auto& f : still) CHECK(f == still[0]);

    const std::string one = "Image-name-unique,hippocampus\na,2\n";
    RenderJob single = synthetic_job(dir.path() / "one", 32, 24, {}, one);
    try {
      animation_frames(single, View::Top, 4);
      FAIL("expected TooFewStages");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooFewStages);
    }
  }

  TEST_CASE("animation file") {
    TempDir dir;
    RenderJob job = synthetic_job(dir.path(), 32, 24);
    AnimationOptions options;
    options.frames_per_transition = 2;
    options.delay_cs = 20;
    const auto path = write_animation(job, View::Top, options);
    CHECK(path.filename() == "render_top.gif");
    const auto gif = testing_support::decode_gif(read_file(path));
    CHECK(gif.frames.size() == 7);
    CHECK(gif.loop_count == 0);
    for (const auto& f : gif.frames) CHECK(f.delay_cs == 20);
  }

  TEST_CASE("job checks") {
    TempDir dir;
    RenderJob job = synthetic_job(dir.path(), 32, 24);
    job.width = 15;
    CHECK_THROWS_AS(check_job(job), Error);
    job.width = 32;
    job.gradient = ColorGradient::from_hex({"#000000", "#FFFFFF"});
    CHECK_THROWS_AS(check_job(job), Error);
  }
}
