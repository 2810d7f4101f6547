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

#ifndef MULTISHAP_TRANSPORT_HPP
#define MULTISHAP_TRANSPORT_HPP

#include <chrono>
#include <cstdio>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multishap/protocol.hpp"

namespace multishap {

class Scorer;

// Moves wire messages to a scorer and back. Replies are returned in request
// order regardless of the order the scorer answered in.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual ScorerMeta handshake() = 0;
  virtual std::vector<Reply> exchange(std::span<const ScoreRequest> requests) = 0;
  virtual std::string describe() const = 0;
};

struct TransportOptions {
  std::chrono::milliseconds timeout{60000};
  // Requests written before waiting for replies.
  std::size_t max_in_flight = 4;
};

// Answers protocol lines on behalf of an in-process scorer. Used for the
// loopback transport, the stdio synthetic scorer and test servers.
class ProtocolServer {
 public:
  explicit ProtocolServer(Scorer& scorer) : scorer_(scorer) {}

  std::string meta_line();
  // One request line in, one reply line out. Never throws: failures become
  // {"id":..,"error":..} replies.
  std::string handle(std::string_view request_line);

 private:
  Scorer& scorer_;
};

// Serves `scorer` over stdin/stdout: meta line first, then one reply per
// request line until EOF.
int serve_stdio(Scorer& scorer, std::FILE* in, std::FILE* out);

// Full encode/decode round trip to an in-process scorer.
class LoopbackTransport : public Transport {
 public:
  explicit LoopbackTransport(std::shared_ptr<Scorer> scorer);
  ScorerMeta handshake() override;
  std::vector<Reply> exchange(std::span<const ScoreRequest> requests) override;
  std::string describe() const override { return "loopback"; }

 private:
  std::shared_ptr<Scorer> scorer_;
  ProtocolServer server_;
};

// Child process speaking newline-delimited JSON on stdin/stdout. The child
// writes its meta object as the first line.
class SubprocessTransport : public Transport {
 public:
  SubprocessTransport(std::string command, TransportOptions options);
  ~SubprocessTransport() override;
  SubprocessTransport(const SubprocessTransport&) = delete;
  SubprocessTransport& operator=(const SubprocessTransport&) = delete;

  ScorerMeta handshake() override;
  std::vector<Reply> exchange(std::span<const ScoreRequest> requests) override;
  std::string describe() const override { return "cmd:" + command_; }

 private:
  void write_line(const std::string& line);
  std::string read_line();

  std::string command_;
  TransportOptions options_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::optional<ScorerMeta> meta_;
};

// GET <base>/meta and POST <base>/score carrying the same JSON bodies.
class HttpTransport : public Transport {
 public:
  HttpTransport(std::string base_url, TransportOptions options);
  ScorerMeta handshake() override;
  std::vector<Reply> exchange(std::span<const ScoreRequest> requests) override;
  std::string describe() const override { return base_url_; }

 private:
  Reply post(const ScoreRequest& request) const;

  std::string base_url_;
  TransportOptions options_;
};

// "cmd:<shell command>" or "http://host:port[/prefix]" (also "http:host:port").
std::unique_ptr<Transport> open_transport(std::string_view endpoint,
                                          TransportOptions options = {});

}  // namespace multishap

#endif  // MULTISHAP_TRANSPORT_HPP
