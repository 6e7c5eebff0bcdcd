#include <regex>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

#include "atlaspaint/atlas.hpp"
#include "atlaspaint/mesh.hpp"
#include "atlaspaint/service.hpp"
#include "atlaspaint/synthetic.hpp"
#include "support/png_reader.hpp"
#include "support/temp_dir.hpp"

using namespace atlaspaint;
using json = nlohmann::json;
using testing_support::TempDir;

namespace {

std::shared_ptr<const LoadedAtlas> synthetic_atlas(const std::filesystem::path& dir, bool hollow = false) {
  SyntheticAtlasOptions options;
  options.hollow = hollow;
  options.stacks = 8;
  options.slices = 12;
  if (hollow) options.atlas_id = "synthetic-hollow";
  return std::make_shared<const LoadedAtlas>(load_atlas(load_manifest(write_synthetic_atlas(dir, options))));
}

std::string request(json config, std::string csv = synthetic_biomarker_csv()) {
  return json{{"config", std::move(config)}, {"csv", std::move(csv)}}.dump();
}

json small_config() { return {{"atlas", "synthetic"}, {"views", {"top"}}, {"resolution", {32, 24}}}; }

std::vector<std::string> diagnostic_keys(const HttpResponse& r) {
  std::vector<std::string> keys;
  const json reply = json::parse(r.body);
  for (const auto& d : reply.at("diagnostics")) keys.push_back(d.at("key").get<std::string>());
  return keys;
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("submit, run and fetch") {
    TempDir dir;
    ServiceOptions options;
    options.spool_dir = dir / "spool";
    options.workers = 1;
    RenderService service(options);
    service.register_atlas(synthetic_atlas(dir / "atlas"));

    const HttpResponse created = service.submit(request(small_config()));
    REQUIRE(created.status == 201);
    const std::string id = json::parse(created.body).at("job_id");
    CHECK(std::regex_match(id, std::regex("[a-z0-9]{16}")));
    service.wait_idle();

    const HttpResponse status = service.job_status(id);
    CHECK(status.status == 200);
    const json record = json::parse(status.body);
    CHECK(record.at("status") == "done");
    CHECK(record.at("error_message").is_null());
    CHECK(std::regex_match(record.at("submitted_at").get<std::string>(),
                           std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
    const auto images = record.at("images").get<std::vector<std::string>>();
    REQUIRE(images.size() == 4);
    CHECK(images[0] == "render_stage1_top.png");

    const HttpResponse image = service.job_image(id, images[0]);
    CHECK(image.status == 200);
    CHECK(image.content_type == "image/png");
    CHECK(testing_support::decode_png(image.body).width == 32);

    CHECK(service.job_image(id, "../../etc/passwd").status == 404);
    CHECK(service.job_image(id, "other.png").status == 404);
    CHECK(service.job_image("nope", images[0]).status == 404);
    CHECK(service.job_status("nope").status == 404);
  }

  TEST_CASE("montage and animation jobs") {
    TempDir dir;
    ServiceOptions options;
    options.spool_dir = dir / "spool";
    RenderService service(options);
    service.register_atlas(synthetic_atlas(dir / "atlas"));
    json montage = small_config();
    montage["mode"] = "montage";
    json anim = small_config();
    anim["mode"] = "animation";
    anim["frames_per_transition"] = 1;
    const std::string m = json::parse(service.submit(request(montage)).body).at("job_id");
    const std::string a = json::parse(service.submit(request(anim)).body).at("job_id");
    service.wait_idle();
    CHECK(service.job(m)->images == std::vector<std::string>{"render_montage.png"});
    CHECK(service.job(a)->images == std::vector<std::string>{"render_top.gif"});
    CHECK(service.job_image(a, "render_top.gif").content_type == "image/gif");
  }

  TEST_CASE("validation diagnostics name the key") {
    TempDir dir;
    ServiceOptions options;
    options.spool_dir = dir / "spool";
    options.start_workers = false;
    RenderService service(options);
    service.register_atlas(synthetic_atlas(dir / "atlas"));
    service.register_atlas(synthetic_atlas(dir / "hollow", true));

    json c = small_config();
    c["colors"] = {"#zzzzzz", "#000000"};
    HttpResponse r = service.submit(request(c));
    CHECK(r.status == 400);
    CHECK(json::parse(r.body).at("error") == "validation failed");
    CHECK(diagnostic_keys(r) == std::vector<std::string>{"colors[0]"});

    c = small_config();
    c["resolution"] = {0, 100};
    CHECK(diagnostic_keys(service.submit(request(c))) == std::vector<std::string>{"resolution[0]"});

    c = small_config();
    c["input_csv"] = "/etc/passwd";
    CHECK(diagnostic_keys(service.submit(request(c))) == std::vector<std::string>{"input_csv"});

    c = small_config();
    c["atlas"] = "missing";
    CHECK(diagnostic_keys(service.submit(request(c))) == std::vector<std::string>{"atlas"});

    c = small_config();
    c["atlas"] = "synthetic-hollow";
    c["views"] = {"top", "inner-left"};
    CHECK(diagnostic_keys(service.submit(request(c))) == std::vector<std::string>{"views[1]"});

    CHECK(diagnostic_keys(service.submit(request(small_config(), "Image-name-unique,frontal\ns1,x\n"))) ==
          std::vector<std::string>{"csv"});
    CHECK(service.submit("{").status == 400);
    CHECK(service.submit(R"({"config": {}})").status == 400);
  }

  TEST_CASE("limits") {
    TempDir dir;
    ServiceOptions options;
    options.spool_dir = dir / "spool";
    options.start_workers = false;
    options.queue_cap = 2;
    options.csv_cap = 4096;
    RenderService service(options);
    service.register_atlas(synthetic_atlas(dir / "atlas"));

    CHECK(service.submit(request(small_config(), std::string(5000, 'x'))).status == 413);
    const HttpResponse first = service.submit(request(small_config()));
    CHECK(first.status == 201);
    CHECK(service.submit(request(small_config())).status == 201);
    CHECK(service.submit(request(small_config())).status == 503);

    const std::string id = json::parse(first.body).at("job_id");
    CHECK(json::parse(service.job_status(id).body).at("status") == "queued");
    CHECK(service.job_image(id, "render_stage1_top.png").status == 409);

    service.start_workers();
    service.wait_idle();
    CHECK(service.submit(request(small_config())).status == 201);
  }

  TEST_CASE("atlas listing") {
    TempDir dir;
    ServiceOptions options;
    options.spool_dir = dir / "spool";
    RenderService service(options);
    CHECK(json::parse(service.atlases().body) == json::array());
    service.register_atlas(synthetic_atlas(dir / "atlas"));
    service.register_atlas(synthetic_atlas(dir / "hollow", true));
    const json list = json::parse(service.atlases().body);
    REQUIRE(list.size() == 2);
    for (const auto& a : list) {
      CHECK(a.at("regions") == 14);
      const auto views = a.at("views_supported").get<std::vector<std::string>>();
      const bool has_inner = std::find(views.begin(), views.end(), "cortical-inner-left") != views.end();
      CHECK(has_inner == (a.at("atlas_id") == "synthetic"));
      CHECK(views.size() == (has_inner ? 7u : 5u));
    }
  }

  TEST_CASE("finished jobs expire") {
    TempDir dir;
    ServiceOptions options;
    options.spool_dir = dir / "spool";
    options.retention = std::chrono::hours(1);
    RenderService service(options);
    service.register_atlas(synthetic_atlas(dir / "atlas"));
    const std::string id = json::parse(service.submit(request(small_config())).body).at("job_id");
    service.wait_idle();
    const auto now = std::chrono::system_clock::now();
    CHECK(service.collect_garbage(now) == 0);
    CHECK(service.collect_garbage(now + std::chrono::hours(2)) == 1);
    CHECK(service.job_status(id).status == 404);
    CHECK_FALSE(std::filesystem::exists(options.spool_dir / id));
  }

  TEST_CASE("HTTP transport") {
    TempDir dir;
    std::filesystem::create_directories(dir / "ui");
    write_file(dir / "ui" / "index.html", "<html>ui</html>");
    ServiceOptions options;
    options.spool_dir = dir / "spool";
    options.cors_origin = "http://localhost:5173";
    options.ui_dir = dir / "ui";
    RenderService service(options);
    service.register_atlas(synthetic_atlas(dir / "atlas"));
    const int port = service.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server([&] { service.listen_after_bind(); });

    httplib::Client client("127.0.0.1", port);
    auto index = client.Get("/");
    REQUIRE(index);
    CHECK(index->status == 200);
    CHECK(index->body == "<html>ui</html>");

    auto list = client.Get("/api/v1/atlases");
    REQUIRE(list);
    CHECK(list->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");

    auto created = client.Post("/api/v1/jobs", request(small_config()), "application/json");
    REQUIRE(created);
    REQUIRE(created->status == 201);
    const std::string id = json::parse(created->body).at("job_id");
    service.wait_idle();
    auto status = client.Get("/api/v1/jobs/" + id);
    REQUIRE(status);
    CHECK(json::parse(status->body).at("status") == "done");
    auto image = client.Get("/api/v1/jobs/" + id + "/images/render_stage2_top.png");
    REQUIRE(image);
    CHECK(image->status == 200);
    CHECK(image->get_header_value("Content-Type") == "image/png");

    for (const std::string& path : std::vector<std::string>{"/api/v1/jobs/" + id + "/images/../../../etc/passwd",
                                   "/api/v1/jobs/" + id + "/images/%2e%2e%2f%2e%2e%2fetc%2fpasswd",
                                   "/../../etc/passwd", "/api/v1/jobs/zzz"}) {
      auto r = client.Get(path);
      REQUIRE(r);
      CHECK_MESSAGE(r->status == 404, path);
    }

    auto bad = client.Post("/api/v1/jobs", "{\"config\": {\"atlas\": 3}, \"csv\": \"\"}", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);

    httplib::Headers preflight = {{"Origin", "http://localhost:5173"}, {"Access-Control-Request-Method", "POST"}};
    auto options_reply = client.Options("/api/v1/jobs", preflight);
    REQUIRE(options_reply);
    CHECK(options_reply->status == 204);

    service.stop();
    server.join();
  }
}
