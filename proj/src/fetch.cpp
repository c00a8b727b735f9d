// Copyright 2026 The gstamp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <curl/curl.h>
#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <memory>
#include <system_error>

#include "gstamp/catalog.hpp"
#include "gstamp/error.hpp"
#include "gstamp/textio.hpp"

namespace gstamp {

namespace {

namespace fs = std::filesystem;

class LockFile {
 public:
  explicit LockFile(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::CacheUnwritable, "cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::CacheUnwritable, "cannot lock " + path.string());
    }
  }
  ~LockFile() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  LockFile(const LockFile&) = delete;
  LockFile& operator=(const LockFile&) = delete;

 private:
  int fd_ = -1;
};

std::size_t append_body(char* ptr, std::size_t size, std::size_t nmemb, void* userdata) {
  static_cast<std::string*>(userdata)->append(ptr, size * nmemb);
  return size * nmemb;
}

// Writes through a temporary file and renames it into place so readers never
// see a partial file.
void atomic_write(const fs::path& target, std::string_view content) {
  fs::path tmp = target;
  tmp += ".tmp";
  try {
    write_file(tmp, content);
  } catch (const Error&) {
    throw Error(ErrorCode::CacheUnwritable, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::CacheUnwritable, "cannot rename into " + target.string());
}

}  // namespace

fs::path resolve_cache_dir(const fs::path& fallback) {
  if (const char* env = std::getenv("GSTAMP_CACHE"); env && *env) return fs::path(env);
  return fallback;
}

bool offline_from_env() {
  const char* env = std::getenv("GSTAMP_OFFLINE");
  return env && std::string_view(env) == "1";
}

std::string curl_download(const std::string& url) {
  static const bool initialized = [] { return curl_global_init(CURL_GLOBAL_DEFAULT) == CURLE_OK; }();
  if (!initialized) throw Error(ErrorCode::NetworkUnavailable, "libcurl initialisation failed");
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> handle(curl_easy_init(), curl_easy_cleanup);
  if (!handle) throw Error(ErrorCode::NetworkUnavailable, "libcurl handle unavailable");
  std::string body;
  curl_easy_setopt(handle.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(handle.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(handle.get(), CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(handle.get(), CURLOPT_CONNECTTIMEOUT, 20L);
  curl_easy_setopt(handle.get(), CURLOPT_TIMEOUT, 120L);
  curl_easy_setopt(handle.get(), CURLOPT_WRITEFUNCTION, append_body);
  curl_easy_setopt(handle.get(), CURLOPT_WRITEDATA, &body);
  const CURLcode rc = curl_easy_perform(handle.get());
  if (rc != CURLE_OK) throw Error(ErrorCode::NetworkUnavailable, url + ": " + curl_easy_strerror(rc));
  return body;
}

std::string fetch_snapshot(const std::string& url, const fs::path& cache_dir, const FetchOptions& options) {
  const fs::path dir = resolve_cache_dir(cache_dir);
  const std::string key = sha256_hex(url);
  const fs::path data_path = dir / (key + ".csv");
  const fs::path sum_path = dir / (key + ".sha256");

  auto read_cached = [&]() -> std::optional<std::string> {
    std::error_code ec;
    if (!fs::exists(data_path, ec)) return std::nullopt;
    std::string content = read_file(data_path);
    std::string recorded = fs::exists(sum_path, ec) ? read_file(sum_path) : std::string();
    if (std::string(trim(recorded)) != sha256_hex(content)) {
      throw Error(ErrorCode::ChecksumMismatch, data_path.string());
    }
    return content;
  };

  if (auto hit = read_cached()) return *hit;

  if (options.offline || offline_from_env()) {
    throw Error(ErrorCode::NetworkUnavailable, "offline mode and no cached copy of " + url);
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::CacheUnwritable, dir.string());

  LockFile lock(dir / ".lock");
  // Another process may have filled the cache while we waited for the lock.
  if (auto hit = read_cached()) return *hit;

  std::string content = options.downloader ? options.downloader(url) : curl_download(url);
  atomic_write(data_path, content);
  atomic_write(sum_path, sha256_hex(content) + "\n");
  return content;
}

}  // namespace gstamp
