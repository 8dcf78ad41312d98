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

#include "trackkit/client.h"

#include <csignal>
#include <cstring>

#include <netdb.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "trackkit/error.h"

namespace trackkit::harness {
namespace {

[[noreturn]] void Fail(const std::string& what) {
  throw Error(ErrorCode::kClientError, what + ": " + std::strerror(errno));
}

TrackResponse Exchange(LineChannel& channel, const TrackRequest& request) {
  channel.WriteLine(RequestToJson(request).dump());
  const std::string line = channel.ReadLine();
  TrackResponse response;
  try {
    response = ResponseFromJson(Json::parse(line));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kClientError, std::string("bad response: ") + e.what());
  }
  if (response.id != request.id) {
    throw Error(ErrorCode::kClientError,
                "response id " + response.id + " does not match " + request.id);
  }
  return response;
}

}  // namespace

void LineChannel::WriteLine(const std::string& line) {
  std::string data = line + "\n";
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    const ssize_t n = ::send(write_fd_, p, left, MSG_NOSIGNAL);
    ssize_t written = n;
    if (n < 0 && errno == ENOTSOCK) written = ::write(write_fd_, p, left);
    if (written < 0) {
      if (errno == EINTR) continue;
      Fail("write");
    }
    p += written;
    left -= static_cast<std::size_t>(written);
  }
}

std::string LineChannel::ReadLine() {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      Fail("read");
    }
    if (n == 0) throw Error(ErrorCode::kClientError, "endpoint closed the stream");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void LineChannel::Close() {
  if (read_fd_ >= 0) ::close(read_fd_);
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  read_fd_ = write_fd_ = -1;
  buffer_.clear();
}

ProcessClient::ProcessClient(std::string command) : command_(std::move(command)) {
  // A dead child must surface as EPIPE, not kill the process.
  std::signal(SIGPIPE, SIG_IGN);
}

ProcessClient::~ProcessClient() { Stop(); }

void ProcessClient::Start() {
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) Fail("pipe");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    Fail("pipe");
  }
  pid_ = ::fork();
  if (pid_ < 0) Fail("fork");
  if (pid_ == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  channel_ = LineChannel(from_child[0], to_child[1]);
}

void ProcessClient::Stop() {
  channel_.Close();
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

TrackResponse ProcessClient::Track(const TrackRequest& request) {
  if (!channel_.open()) Start();
  try {
    return Exchange(channel_, request);
  } catch (const Error&) {
    Stop();  // restart on the next attempt
    throw;
  }
}

TcpClient::TcpClient(std::string host, int port)
    : host_(std::move(host)), port_(port) {}

TcpClient::~TcpClient() { Disconnect(); }

void TcpClient::Connect() {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(port_);
  if (::getaddrinfo(host_.c_str(), port.c_str(), &hints, &res) != 0) {
    throw Error(ErrorCode::kClientError, "cannot resolve " + host_);
  }
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) {
    throw Error(ErrorCode::kClientError,
                "cannot connect to " + host_ + ":" + port);
  }
  channel_ = LineChannel(fd_, fd_);
}

void TcpClient::Disconnect() {
  channel_.Close();
  fd_ = -1;
}

TrackResponse TcpClient::Track(const TrackRequest& request) {
  if (fd_ < 0) Connect();
  try {
    return Exchange(channel_, request);
  } catch (const Error&) {
    Disconnect();
    throw;
  }
}

ClientFactory MakeClientFactory(const std::string& endpoint) {
  if (endpoint.rfind("exec:", 0) == 0) {
    const std::string command = endpoint.substr(5);
    return [command] { return std::make_unique<ProcessClient>(command); };
  }
  if (endpoint.rfind("tcp://", 0) == 0) {
    const std::string rest = endpoint.substr(6);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kParseError, "tcp endpoint needs host:port");
    }
    const std::string host = rest.substr(0, colon);
    int port = 0;
    try {
      port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError, "bad port in " + endpoint);
    }
    return [host, port] { return std::make_unique<TcpClient>(host, port); };
  }
  throw Error(ErrorCode::kParseError,
              "endpoint must be exec:<command> or tcp://host:port, got " + endpoint);
}

}  // namespace trackkit::harness
