#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atlaspaint/atlas.hpp"

namespace atlaspaint {

enum class JobStatus { Queued, Running, Done, Error };

std::string_view to_string(JobStatus status);

struct JobRecord {
  std::string job_id;
  JobStatus status = JobStatus::Queued;
  std::chrono::system_clock::time_point submitted_at;
  std::vector<std::string> images;
  std::optional<std::string> error_message;
};

std::string job_record_json(const JobRecord& record);

struct ServiceOptions {
  std::filesystem::path spool_dir;
  // Concurrent jobs; 0 = worker_count().
  unsigned workers = 0;
  std::size_t queue_cap = 64;
  std::size_t csv_cap = 10 * 1024 * 1024;
  std::chrono::seconds retention = std::chrono::hours(24);
  // Sent as Access-Control-Allow-Origin when non-empty.
  std::string cors_origin;
  // Static files served from `/`.
  std::optional<std::filesystem::path> ui_dir;
  bool start_workers = true;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Job registry, FIFO worker pool and the REST endpoints under /api/v1. The
// handle_* members are the endpoint logic without the HTTP transport.
class RenderService {
 public:
  explicit RenderService(ServiceOptions options);
  ~RenderService();
  RenderService(const RenderService&) = delete;
  RenderService& operator=(const RenderService&) = delete;

  // Registers (or replaces) an atlas under its atlas_id.
  void register_atlas(std::shared_ptr<const LoadedAtlas> atlas);
  void register_manifest(const std::filesystem::path& manifest_path);

  HttpResponse submit(std::string_view body);
  HttpResponse job_status(std::string_view job_id) const;
  HttpResponse job_image(std::string_view job_id, std::string_view name) const;
  HttpResponse atlases() const;

  std::optional<JobRecord> job(std::string_view job_id) const;

  void start_workers();
  // Blocks until the queue is empty and no job is running.
  void wait_idle();
  // Drops finished jobs submitted before `now - retention` along with their
  // spool directories; returns how many were removed.
  std::size_t collect_garbage(std::chrono::system_clock::time_point now);

  // HTTP transport. bind_to_any_port returns the port (or -1); listen_after_bind
  // and listen block until stop().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  bool listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace atlaspaint
