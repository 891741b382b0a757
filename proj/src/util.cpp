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

#include "emsforge/util.hpp"
#include "emsforge/core.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <cmath>
#include <vector>

namespace emsforge
{
    std::string format_double(double x)
    {
        char buf[64];
        // integral values (frequencies in Hz, counts) read better without an exponent
        const bool integral = std::isfinite(x) && std::abs(x) < 1e15 && x == std::trunc(x);
        auto res = integral ? std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed)
                            : std::to_chars(buf, buf + sizeof(buf), x);
        return std::string(buf, res.ptr);
    }

    void write_file_atomic(const std::filesystem::path& path, const std::string& content)
    {
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw Error("cannot open '" + tmp.string() + "' for writing");
            out << content;
            out.flush();
            if (!out)
                throw Error("write to '" + tmp.string() + "' failed");
        }
        std::filesystem::rename(tmp, path);
    }

    std::string read_text_file(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error("cannot open '" + path.string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::size_t thread_count()
    {
        if (const char* env = std::getenv("EMS_FORGE_THREADS"))
        {
            char* end = nullptr;
            long n = std::strtol(env, &end, 10);
            if (end != env && n >= 1)
                return static_cast<std::size_t>(n);
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
    {
        const std::size_t nt = std::min(thread_count(), n);
        if (nt <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;

        auto worker = [&]()
        {
            for (std::size_t i = next++; i < n; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = n;
                }
            }
        };

        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < nt; ++t)
            pool.emplace_back(worker);
        worker();
        for (auto& th : pool)
            th.join();
        if (error)
            std::rethrow_exception(error);
    }
}
