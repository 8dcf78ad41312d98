/* Copyright 2026 The trackkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Line-delimited JSON clients for an external tracking model: a child
// process speaking over stdin/stdout, or a TCP service.

#ifndef TRACKKIT_CLIENT_H_
#define TRACKKIT_CLIENT_H_

#include <string>
#include <sys/types.h>

#include "trackkit/harness.h"

namespace trackkit::harness {

// Reads and writes newline-terminated lines over a pair of file descriptors.
class LineChannel {
 public:
  LineChannel() = default;
  LineChannel(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

  void WriteLine(const std::string& line);
  std::string ReadLine();
  void Close();
  bool open() const { return read_fd_ >= 0 && write_fd_ >= 0; }

 private:
  int read_fd_ = -1;
  int write_fd_ = -1;
  std::string buffer_;
};

// Spawns `/bin/sh -c command` once and exchanges one request/response line
// pair per call.
class ProcessClient : public TrackingClient {
 public:
  explicit ProcessClient(std::string command);
  ~ProcessClient() override;
  ProcessClient(const ProcessClient&) = delete;
  ProcessClient& operator=(const ProcessClient&) = delete;

  TrackResponse Track(const TrackRequest& request) override;

 private:
  void Start();
  void Stop();

  std::string command_;
  pid_t pid_ = -1;
  LineChannel channel_;
};

class TcpClient : public TrackingClient {
 public:
  TcpClient(std::string host, int port);
  ~TcpClient() override;
  TcpClient(const TcpClient&) = delete;
  TcpClient& operator=(const TcpClient&) = delete;

  TrackResponse Track(const TrackRequest& request) override;

 private:
  void Connect();
  void Disconnect();

  std::string host_;
  int port_;
  int fd_ = -1;
  LineChannel channel_;
};

// "exec:<shell command>" or "tcp://host:port". Throws ParseError otherwise.
ClientFactory MakeClientFactory(const std::string& endpoint);

}  // namespace trackkit::harness

#endif  // TRACKKIT_CLIENT_H_
