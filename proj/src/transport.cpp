/*
 * Copyright 2026 The multishap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "multishap/transport.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <future>
#include <map>

#include "httplib.h"
#include "multishap/error.hpp"
#include "multishap/scorer.hpp"

namespace multishap {

namespace {

std::string errno_message(std::string_view what) {
  return std::string(what) + ": " + std::strerror(errno);
}

// Reorders replies to match `requests`, rejecting unknown or duplicate ids.
std::vector<Reply> order_replies(std::span<const ScoreRequest> requests,
                                 std::vector<Reply> replies) {
  std::map<std::int64_t, std::size_t> position;
  for (std::size_t k = 0; k < requests.size(); ++k) position[requests[k].id] = k;
  std::vector<std::optional<Reply>> ordered(requests.size());
  for (auto& reply : replies) {
    auto it = position.find(reply_id(reply));
    if (it == position.end()) {
      if (auto* err = std::get_if<ErrorReply>(&reply)) {
        throw ScorerError("scorer error: " + err->error);
      }
      throw ScorerError("reply with unknown id " + std::to_string(reply_id(reply)));
    }
    if (ordered[it->second]) {
      throw ScorerError("duplicate reply for id " + std::to_string(it->first));
    }
    ordered[it->second] = std::move(reply);
  }
  std::vector<Reply> out;
  out.reserve(ordered.size());
  for (auto& r : ordered) out.push_back(std::move(*r));
  return out;
}

}  // namespace

std::string ProtocolServer::meta_line() { return encode_meta(scorer_.meta()); }

std::string ProtocolServer::handle(std::string_view request_line) {
  std::int64_t id = -1;
  try {
    const ScoreRequest request = decode_request(request_line);
    id = request.id;
    const ScorerMeta meta = scorer_.meta();
    const FeatureSpace space = space_from_meta(meta);
    std::vector<Coalition> coalitions;
    coalitions.reserve(request.coalitions.size());
    for (const auto& indices : request.coalitions) {
      coalitions.push_back(
          coalition_from_indices(space, indices, DuplicatePolicy::kReject));
    }
    ScoreResponse response{id, scorer_.score(request.sample_id, coalitions)};
    return encode_response(response);
  } catch (const std::exception& e) {
    return encode_error(ErrorReply{id, e.what()});
  }
}

int serve_stdio(Scorer& scorer, std::FILE* in, std::FILE* out) {
  ProtocolServer server(scorer);
  std::fprintf(out, "%s\n", server.meta_line().c_str());
  std::fflush(out);
  std::string line;
  int ch;
  while ((ch = std::fgetc(in)) != EOF) {
    if (ch != '\n') {
      line.push_back(static_cast<char>(ch));
      continue;
    }
    if (!line.empty()) {
      std::fprintf(out, "%s\n", server.handle(line).c_str());
      std::fflush(out);
    }
    line.clear();
  }
  return 0;
}

LoopbackTransport::LoopbackTransport(std::shared_ptr<Scorer> scorer)
    : scorer_(std::move(scorer)), server_(*scorer_) {}

ScorerMeta LoopbackTransport::handshake() { return decode_meta(server_.meta_line()); }

std::vector<Reply> LoopbackTransport::exchange(std::span<const ScoreRequest> requests) {
  std::vector<Reply> replies;
  replies.reserve(requests.size());
  for (const auto& r : requests) {
    replies.push_back(decode_reply(server_.handle(encode_request(r))));
  }
  return replies;
}

SubprocessTransport::SubprocessTransport(std::string command, TransportOptions options)
    : command_(std::move(command)), options_(options) {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) throw ScorerError(errno_message("pipe"));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw ScorerError(errno_message("pipe"));
  }
  pid_ = fork();
  if (pid_ < 0) throw ScorerError(errno_message("fork"));
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  signal(SIGPIPE, SIG_IGN);
}

SubprocessTransport::~SubprocessTransport() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    for (int attempt = 0; attempt < 50; ++attempt) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) return;
      usleep(10000);
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
  }
}

void SubprocessTransport::write_line(const std::string& line) {
  std::string data = line;
  data.push_back('\n');
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t w = write(to_child_, data.data() + written, data.size() - written);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(errno_message("write to scorer '" + command_ + "'"));
    }
    written += static_cast<std::size_t>(w);
  }
}

std::string SubprocessTransport::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      throw ScorerError("timeout waiting for scorer '" + command_ + "'");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(errno_message("poll"));
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t got = read(from_child_, chunk, sizeof chunk);
    if (got < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(errno_message("read from scorer"));
    }
    if (got == 0) throw ScorerError("scorer '" + command_ + "' closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

ScorerMeta SubprocessTransport::handshake() {
  if (!meta_) meta_ = decode_meta(read_line());
  return *meta_;
}

std::vector<Reply> SubprocessTransport::exchange(std::span<const ScoreRequest> requests) {
  handshake();
  std::vector<Reply> replies;
  replies.reserve(requests.size());
  const std::size_t window = std::max<std::size_t>(1, options_.max_in_flight);
  for (std::size_t begin = 0; begin < requests.size(); begin += window) {
    const std::size_t end = std::min(requests.size(), begin + window);
    for (std::size_t k = begin; k < end; ++k) write_line(encode_request(requests[k]));
    for (std::size_t k = begin; k < end; ++k) replies.push_back(decode_reply(read_line()));
  }
  return order_replies(requests, std::move(replies));
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path prefix without trailing slash
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InvalidArgument("bad URL '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  parsed.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) {
    parsed.prefix = url.substr(path_start);
    while (!parsed.prefix.empty() && parsed.prefix.back() == '/') parsed.prefix.pop_back();
  }
  return parsed;
}

httplib::Client make_client(const std::string& origin, std::chrono::milliseconds timeout) {
  httplib::Client client(origin);
  const auto secs = static_cast<time_t>(timeout.count() / 1000);
  const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  return client;
}

}  // namespace

HttpTransport::HttpTransport(std::string base_url, TransportOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  parse_url(base_url_);
}

ScorerMeta HttpTransport::handshake() {
  const auto url = parse_url(base_url_);
  auto client = make_client(url.origin, options_.timeout);
  auto res = client.Get(url.prefix + "/meta");
  if (!res) {
    throw ScorerError("GET " + base_url_ + "/meta failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ScorerError("GET " + base_url_ + "/meta returned HTTP " + std::to_string(res->status));
  }
  return decode_meta(res->body);
}

Reply HttpTransport::post(const ScoreRequest& request) const {
  const auto url = parse_url(base_url_);
  auto client = make_client(url.origin, options_.timeout);
  auto res = client.Post(url.prefix + "/score", encode_request(request), "application/json");
  if (!res) {
    throw ScorerError("POST " + base_url_ + "/score failed: " + httplib::to_string(res.error()));
  }
  // Error replies may arrive with a non-200 status; the body decides.
  return decode_reply(res->body);
}

std::vector<Reply> HttpTransport::exchange(std::span<const ScoreRequest> requests) {
  std::vector<Reply> replies;
  replies.reserve(requests.size());
  const std::size_t window = std::max<std::size_t>(1, options_.max_in_flight);
  for (std::size_t begin = 0; begin < requests.size(); begin += window) {
    const std::size_t end = std::min(requests.size(), begin + window);
    std::vector<std::future<Reply>> inflight;
    for (std::size_t k = begin; k < end; ++k) {
      inflight.push_back(std::async(std::launch::async,
                                    [this, &requests, k] { return post(requests[k]); }));
    }
    for (auto& f : inflight) replies.push_back(f.get());
  }
  return order_replies(requests, std::move(replies));
}

std::unique_ptr<Transport> open_transport(std::string_view endpoint, TransportOptions options) {
  if (endpoint.starts_with("cmd:")) {
    const auto command = endpoint.substr(4);
    if (command.empty()) throw InvalidArgument("empty scorer command");
    return std::make_unique<SubprocessTransport>(std::string(command), options);
  }
  if (endpoint.starts_with("http://") || endpoint.starts_with("https://")) {
    return std::make_unique<HttpTransport>(std::string(endpoint), options);
  }
  if (endpoint.starts_with("http:")) {
    auto rest = endpoint.substr(5);
    while (rest.starts_with("/")) rest.remove_prefix(1);
    return std::make_unique<HttpTransport>("http://" + std::string(rest), options);
  }
  throw InvalidArgument("unrecognized scorer endpoint '" + std::string(endpoint) +
                        "' (expected cmd:<command> or http://host:port)");
}

}  // namespace multishap
