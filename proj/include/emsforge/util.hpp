// SPDX-License-Identifier: Apache-2.0
//
// ems-forge: synthesis and analysis of one-time-programmable electromagnetic skins
// Copyright (C) 2026 The ems-forge authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef EMSFORGE_UTIL_HPP
#define EMSFORGE_UTIL_HPP

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>

namespace emsforge
{
    /// Shortest decimal representation that round-trips to the same double; integral values
    /// below 1e15 are written without exponent.
    std::string format_double(double x);

    /// Writes the whole content to a temporary sibling and renames it over the target.
    void write_file_atomic(const std::filesystem::path& path, const std::string& content);

    /// Reads a whole file; throws emsforge::Error when it cannot be opened.
    std::string read_text_file(const std::filesystem::path& path);

    /// Number of worker threads: EMS_FORGE_THREADS if set (>= 1), else hardware concurrency.
    std::size_t thread_count();

    /// Calls fn(i) for i in [0, n) on up to thread_count() threads. fn must only write to
    /// per-index storage; the first exception thrown is rethrown on the calling thread.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);
}

#endif
