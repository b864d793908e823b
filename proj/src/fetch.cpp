#include <atomic>
#include <fstream>
#include <functional>
#include <thread>

#include <unistd.h>

#include <fmt/format.h>
#include <httplib.h>

#include "gnsspred/error.hpp"
#include "gnsspred/ingest.hpp"

namespace gnsspred {

namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw NetworkError(fmt::format("base url '{}' has no scheme", url), std::nullopt);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  UrlParts parts;
  parts.origin = url.substr(0, path_start);
  parts.path = path_start == std::string::npos ? std::string{} : url.substr(path_start);
  while (!parts.path.empty() && parts.path.back() == '/') parts.path.pop_back();
  return parts;
}

}  // namespace

std::filesystem::path cache_path(const FetchOptions& options, std::string_view station_id) {
  return options.cache_dir / (std::string(station_id) + options.suffix);
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  auto tmp = path;
  tmp += fmt::format(".tmp.{}.{}.{}", ::getpid(), tid % 1000000, counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::IoError, fmt::format("short write to {}", tmp.string()));
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, fmt::format("cannot rename into {}", path.string()));
  }
}

std::string fetch_station(std::string_view station_id, const FetchOptions& options) {
  if (!is_valid_station_id(station_id)) {
    throw Error(ErrorCode::ParseError, fmt::format("invalid station id '{}'", station_id));
  }
  const auto cached = cache_path(options, station_id);
  if (std::filesystem::is_regular_file(cached)) return read_text_file(cached);
  if (options.offline) {
    throw Error(ErrorCode::CacheMissOffline,
                fmt::format("station {} not cached at {} and offline mode is on", station_id,
                            cached.string()));
  }

  const auto url = split_url(options.base_url);
  const std::string target = fmt::format("{}/{}{}", url.path, station_id, options.suffix);

  httplib::Client client(url.origin);
  client.set_connection_timeout(options.timeout_seconds, 0);
  client.set_read_timeout(options.timeout_seconds, 0);
  client.set_follow_location(true);

  // One retry on transport failure; HTTP status errors are final.
  auto response = client.Get(target);
  if (!response) response = client.Get(target);
  if (!response) {
    throw NetworkError(fmt::format("GET {}{} failed: {}", url.origin, target,
                                   httplib::to_string(response.error())),
                       std::nullopt);
  }
  if (response->status == 404) {
    throw Error(ErrorCode::StationNotFound,
                fmt::format("station {} not found at {}{}", station_id, url.origin, target));
  }
  if (response->status != 200) {
    throw NetworkError(
        fmt::format("GET {}{} returned HTTP {}", url.origin, target, response->status),
        response->status);
  }
  atomic_write(cached, response->body);
  return response->body;
}

}  // namespace gnsspred
