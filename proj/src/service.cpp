#include "atlaspaint/service.hpp"

#include <algorithm>
#include <condition_variable>
#include <ctime>
#include <deque>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <thread>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"

#include "atlaspaint/compose.hpp"
#include "atlaspaint/config.hpp"
#include "atlaspaint/error.hpp"
#include "atlaspaint/mesh.hpp"
#include "atlaspaint/parallel.hpp"

namespace atlaspaint {

namespace {

using nlohmann::json;

constexpr std::size_t kJobIdLength = 16;

std::string iso_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t seconds = std::chrono::system_clock::to_time_t(t);
  std::tm utc{};
  gmtime_r(&seconds, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

HttpResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(int status, const std::string& message) {
  return json_response(status, json{{"error", message}});
}

struct Diagnostic {
  std::string key;
  std::string message;
};

HttpResponse validation_response(const std::vector<Diagnostic>& diagnostics) {
  json list = json::array();
  for (const Diagnostic& d : diagnostics) list.push_back({{"key", d.key}, {"message", d.message}});
  return json_response(400, json{{"error", "validation failed"}, {"diagnostics", list}});
}

std::string content_type_for(std::string_view name) {
  if (name.ends_with(".png")) return "image/png";
  if (name.ends_with(".gif")) return "image/gif";
  return "application/octet-stream";
}

struct Payload {
  RenderJob job;
  OutputMode mode = OutputMode::Images;
  int pad = 8;
  View animation_view = View::Top;
  AnimationOptions animation;
};

struct Entry {
  JobRecord record;
  std::shared_ptr<Payload> payload;
};

}  // namespace

std::string_view to_string(JobStatus status) {
  switch (status) {
    case JobStatus::Queued:
      return "queued";
    case JobStatus::Running:
      return "running";
    case JobStatus::Done:
      return "done";
    case JobStatus::Error:
      return "error";
  }
  return "error";
}

std::string job_record_json(const JobRecord& record) {
  json j{{"job_id", record.job_id},
         {"status", std::string(to_string(record.status))},
         {"submitted_at", iso_timestamp(record.submitted_at)},
         {"images", record.images}};
  j["error_message"] = record.error_message ? json(*record.error_message) : json(nullptr);
  return j.dump();
}

struct RenderService::Impl {
  ServiceOptions options;
  unsigned worker_total = 1;

  mutable std::shared_mutex atlas_mutex;
  std::map<std::string, std::shared_ptr<const LoadedAtlas>> atlases;

  mutable std::shared_mutex jobs_mutex;
  std::unordered_map<std::string, Entry> jobs;

  std::mutex queue_mutex;
  std::condition_variable queue_cv;
  std::condition_variable idle_cv;
  std::condition_variable collector_cv;
  std::deque<std::string> queue;
  std::size_t pending = 0;  // queued + running
  bool stopping = false;
  std::vector<std::thread> workers;
  std::thread collector;

  std::mutex rng_mutex;
  std::mt19937_64 rng{std::random_device{}()};

  httplib::Server server;

  std::string new_job_id() {
    static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::lock_guard lock(rng_mutex);
    std::uniform_int_distribution<int> pick(0, 35);
    std::string id(kJobIdLength, 'a');
    for (char& c : id) c = kAlphabet[pick(rng)];
    return id;
  }

  void run_worker() {
    for (;;) {
      std::string id;
      {
        std::unique_lock lock(queue_mutex);
        queue_cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        id = std::move(queue.front());
        queue.pop_front();
      }
      std::shared_ptr<Payload> payload;
      {
        std::unique_lock lock(jobs_mutex);
        auto it = jobs.find(id);
        if (it != jobs.end()) {
          it->second.record.status = JobStatus::Running;
          payload = it->second.payload;
        }
      }
      std::vector<std::string> images;
      std::optional<std::string> failure;
      if (payload) {
        try {
          images = execute(*payload, id);
        } catch (const std::exception& e) {
          failure = e.what();
        }
      }
      {
        std::unique_lock lock(jobs_mutex);
        auto it = jobs.find(id);
        if (it != jobs.end()) {
          Entry& entry = it->second;
          if (failure || images.empty()) {
            entry.record.status = JobStatus::Error;
            entry.record.error_message = failure ? *failure : "job produced no images";
          } else {
            entry.record.status = JobStatus::Done;
            entry.record.images = std::move(images);
          }
          entry.payload.reset();
        }
      }
      {
        std::lock_guard lock(queue_mutex);
        --pending;
      }
      idle_cv.notify_all();
    }
  }

  std::vector<std::string> execute(Payload& payload, const std::string& id) {
    RenderJob& job = payload.job;
    job.out_dir = options.spool_dir / id;
    std::vector<std::filesystem::path> files;
    switch (payload.mode) {
      case OutputMode::Images: {
        JobOutput out = render_job(job);
        if (!out.failures.empty()) throw Error(out.failures.front().code, out.failures.front().message);
        files = std::move(out.files);
        break;
      }
      case OutputMode::Montage:
        files.push_back(write_montage(job, payload.pad));
        break;
      case OutputMode::Animation:
        files.push_back(write_animation(job, payload.animation_view, payload.animation));
        break;
    }
    std::vector<std::string> names;
    for (const auto& f : files) names.push_back(f.filename().string());
    return names;
  }

  void run_collector() {
    const auto period = std::min<std::chrono::seconds>(options.retention, std::chrono::hours(1));
    std::unique_lock lock(queue_mutex);
    while (!stopping) {
      if (collector_cv.wait_for(lock, std::max(period, std::chrono::seconds(1)), [&] { return stopping; })) break;
      lock.unlock();
      collect(std::chrono::system_clock::now());
      lock.lock();
    }
  }

  std::size_t collect(std::chrono::system_clock::time_point now) {
    std::vector<std::string> removed;
    {
      std::unique_lock lock(jobs_mutex);
      for (auto it = jobs.begin(); it != jobs.end();) {
        const JobRecord& r = it->second.record;
        const bool finished = r.status == JobStatus::Done || r.status == JobStatus::Error;
        if (finished && r.submitted_at + options.retention <= now) {
          removed.push_back(it->first);
          it = jobs.erase(it);
        } else {
          ++it;
        }
      }
    }
    for (const std::string& id : removed) {
      std::error_code ec;
      std::filesystem::remove_all(options.spool_dir / id, ec);
    }
    return removed.size();
  }
};

RenderService::RenderService(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.options = std::move(options);
  s.worker_total = s.options.workers == 0 ? worker_count() : s.options.workers;
  if (s.options.spool_dir.empty()) {
    s.options.spool_dir = std::filesystem::temp_directory_path() / ("atlaspaint-spool-" + s.new_job_id());
  }
  std::error_code ec;
  std::filesystem::create_directories(s.options.spool_dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, "cannot create spool directory '" + s.options.spool_dir.string() + "': " + ec.message());
  }

  httplib::Server& server = s.server;
  server.set_payload_max_length(s.options.csv_cap * 6 + (1u << 20));

  auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Post("/api/v1/jobs", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, submit(req.body));
  });
  server.Get(R"(/api/v1/jobs/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, job_status(req.matches[1].str()));
  });
  server.Get(R"(/api/v1/jobs/([^/]+)/images/(.+))",
             [this, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, job_image(req.matches[1].str(), req.matches[2].str()));
             });
  server.Get("/api/v1/atlases",
             [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, atlases()); });

  if (!s.options.cors_origin.empty()) {
    const std::string origin = s.options.cors_origin;
    server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    });
    server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.set_header("Access-Control-Max-Age", "600");
    });
  }

  if (s.options.ui_dir) {
    if (!server.set_mount_point("/", s.options.ui_dir->string())) {
      throw Error(ErrorCode::IoError, "UI directory '" + s.options.ui_dir->string() + "' does not exist");
    }
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(
          "<!doctype html><title>atlaspaint</title><p>atlaspaint render service. "
          "Start with <code>--ui-dir</code> to serve the web UI; the API lives under "
          "<a href=\"/api/v1/atlases\">/api/v1</a>.</p>",
          "text/html");
    });
  }

  if (s.options.start_workers) start_workers();
  s.collector = std::thread([&s] { s.run_collector(); });
}

RenderService::~RenderService() { stop(); }

void RenderService::register_atlas(std::shared_ptr<const LoadedAtlas> atlas) {
  if (!atlas) throw Error(ErrorCode::InvalidArgument, "null atlas");
  std::unique_lock lock(impl_->atlas_mutex);
  impl_->atlases[atlas->manifest.atlas_id] = std::move(atlas);
}

void RenderService::register_manifest(const std::filesystem::path& manifest_path) {
  register_atlas(std::make_shared<const LoadedAtlas>(load_atlas(load_manifest(manifest_path))));
}

HttpResponse RenderService::submit(std::string_view body) {
  Impl& s = *impl_;
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    return validation_response({{"", "request body is not valid JSON"}});
  }
  if (!doc.is_object()) return validation_response({{"", "request body must be a JSON object"}});
  std::vector<Diagnostic> diagnostics;
  for (const auto& [key, value] : doc.items()) {
    if (key != "config" && key != "csv") diagnostics.push_back({key, "unknown key"});
  }
  const auto config_it = doc.find("config");
  const auto csv_it = doc.find("csv");
  if (config_it == doc.end() || !config_it->is_object()) diagnostics.push_back({"config", "expected a config object"});
  if (csv_it == doc.end() || !csv_it->is_string()) diagnostics.push_back({"csv", "expected the CSV text as a string"});
  if (csv_it != doc.end() && csv_it->is_string() && csv_it->get_ref<const std::string&>().size() > s.options.csv_cap) {
    return error_response(413, "csv exceeds " + std::to_string(s.options.csv_cap) + " bytes");
  }
  if (!diagnostics.empty()) return validation_response(diagnostics);

  auto payload = std::make_shared<Payload>();
  try {
    ConfigParseOptions parse_options;
    parse_options.allow_paths = false;
    const Config config = parse_config(config_it->dump(), parse_options);
    if (!config.atlas) return validation_response({{"atlas", "required"}});
    std::shared_ptr<const LoadedAtlas> atlas;
    {
      std::shared_lock lock(s.atlas_mutex);
      if (auto it = s.atlases.find(*config.atlas); it != s.atlases.end()) atlas = it->second;
    }
    if (!atlas) return validation_response({{"atlas", "unknown atlas '" + *config.atlas + "'"}});
    for (std::size_t i = 0; i < config.views.size(); ++i) {
      if (!view_supported(atlas->manifest, config.views[i])) {
        diagnostics.push_back({"views[" + std::to_string(i) + "]", "view " + std::string(to_string(config.views[i])) +
                                                                        " is not available for atlas '" +
                                                                        *config.atlas + "'"});
      }
    }
    const View animation_view = config.animation_view.value_or(config.views.front());
    if (config.mode == OutputMode::Animation && !view_supported(atlas->manifest, animation_view)) {
      diagnostics.push_back({"animation_view", "view " + std::string(to_string(animation_view)) + " is not available"});
    }
    if (!diagnostics.empty()) return validation_response(diagnostics);
    try {
      payload->job = make_job(config, atlas, csv_it->get_ref<const std::string&>());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      return validation_response({{"csv", e.what()}});
    }
    if (config.mode == OutputMode::Animation && payload->job.table.stage_count() < 2) {
      return validation_response({{"csv", "animation needs at least 2 stages"}});
    }
    payload->mode = config.mode;
    payload->pad = config.pad;
    payload->animation_view = animation_view;
    payload->animation = {config.frames_per_transition, config.delay_cs, config.dither};
    const unsigned per_job = std::max(1u, worker_count() / std::max(1u, s.worker_total));
    payload->job.threads = per_job;
  } catch (const Error& e) {
    return validation_response({{e.context(), e.what()}});
  }

  {
    std::lock_guard lock(s.queue_mutex);
    if (s.pending >= s.options.queue_cap) return error_response(503, "render queue is full");
    ++s.pending;
  }
  std::string id;
  {
    std::unique_lock lock(s.jobs_mutex);
    do {
      id = s.new_job_id();
    } while (s.jobs.count(id) != 0);
    Entry entry;
    entry.record.job_id = id;
    entry.record.submitted_at = std::chrono::system_clock::now();
    entry.payload = std::move(payload);
    s.jobs.emplace(id, std::move(entry));
  }
  {
    std::lock_guard lock(s.queue_mutex);
    s.queue.push_back(id);
  }
  s.queue_cv.notify_all();
  return json_response(201, json{{"job_id", id}});
}

std::optional<JobRecord> RenderService::job(std::string_view job_id) const {
  std::shared_lock lock(impl_->jobs_mutex);
  auto it = impl_->jobs.find(std::string(job_id));
  if (it == impl_->jobs.end()) return std::nullopt;
  return it->second.record;
}

HttpResponse RenderService::job_status(std::string_view job_id) const {
  const auto record = job(job_id);
  if (!record) return error_response(404, "unknown job");
  return {200, "application/json", job_record_json(*record)};
}

HttpResponse RenderService::job_image(std::string_view job_id, std::string_view name) const {
  const auto record = job(job_id);
  if (!record) return error_response(404, "unknown job");
  if (record->status != JobStatus::Done) {
    return error_response(409, "job is " + std::string(to_string(record->status)));
  }
  // Only names the job itself reported are ever mapped to files.
  const auto it = std::find(record->images.begin(), record->images.end(), name);
  if (it == record->images.end()) return error_response(404, "unknown image");
  try {
    return {200, content_type_for(name), read_file(impl_->options.spool_dir / record->job_id / *it)};
  } catch (const Error&) {
    return error_response(404, "image no longer available");
  }
}

HttpResponse RenderService::atlases() const {
  json list = json::array();
  std::shared_lock lock(impl_->atlas_mutex);
  for (const auto& [id, atlas] : impl_->atlases) {
    json views = json::array();
    for (View v : supported_views(atlas->manifest)) views.push_back(std::string(to_string(v)));
    list.push_back({{"atlas_id", id}, {"views_supported", views}, {"regions", atlas->manifest.regions.size()}});
  }
  return json_response(200, list);
}

void RenderService::start_workers() {
  Impl& s = *impl_;
  std::lock_guard lock(s.queue_mutex);
  if (!s.workers.empty() || s.stopping) return;
  for (unsigned i = 0; i < s.worker_total; ++i) s.workers.emplace_back([&s] { s.run_worker(); });
}

void RenderService::wait_idle() {
  std::unique_lock lock(impl_->queue_mutex);
  impl_->idle_cv.wait(lock, [&] { return impl_->pending == 0 || impl_->stopping; });
}

std::size_t RenderService::collect_garbage(std::chrono::system_clock::time_point now) { return impl_->collect(now); }

int RenderService::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool RenderService::listen_after_bind() { return impl_->server.listen_after_bind(); }

bool RenderService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

void RenderService::stop() {
  Impl& s = *impl_;
  s.server.stop();
  {
    std::lock_guard lock(s.queue_mutex);
    s.stopping = true;
  }
  s.queue_cv.notify_all();
  s.idle_cv.notify_all();
  s.collector_cv.notify_all();
  for (std::thread& t : s.workers) {
    if (t.joinable()) t.join();
  }
  s.workers.clear();
  if (s.collector.joinable()) s.collector.join();
}

}  // namespace atlaspaint
