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

#ifndef TRACKKIT_LOG_H_
#define TRACKKIT_LOG_H_

#include <sstream>
#include <string>

namespace trackkit {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Level from TRACKKIT_LOG (error|warn|info|debug); warn when unset.
LogLevel CurrentLogLevel();
void SetLogLevel(LogLevel level);

// Writes one line to stderr. Thread-safe.
void Log(LogLevel level, const std::string& message);

inline void LogWarn(const std::string& m) { Log(LogLevel::kWarn, m); }
inline void LogInfo(const std::string& m) { Log(LogLevel::kInfo, m); }
inline void LogDebug(const std::string& m) { Log(LogLevel::kDebug, m); }
inline void LogError(const std::string& m) { Log(LogLevel::kError, m); }

}  // namespace trackkit

#endif  // TRACKKIT_LOG_H_
