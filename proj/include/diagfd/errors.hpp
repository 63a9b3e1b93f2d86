#pragma once

#include <stdexcept>
#include <string>

namespace diagfd
{
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class InvalidTimestamp : public Error
    {
    public:
        using Error::Error;
    };

    class SelfTest : public Error
    {
    public:
        using Error::Error;
    };

    /// An incoming diagnostic item broke the wire contract (e.g. carried an unknown timestamp).
    class ProtocolViolation : public Error
    {
    public:
        using Error::Error;
    };

    class InvalidCluster : public Error
    {
    public:
        using Error::Error;
    };

    class InvalidScenario : public Error
    {
    public:
        using Error::Error;
    };

    /// The engine was asked to do something its own invariants forbid (e.g. a crashed tester).
    class SchedulerBug : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    class InapplicableRegime : public Error
    {
    public:
        using Error::Error;
    };

    class ParseError : public Error
    {
    public:
        ParseError(int line, const std::string &what)
            : Error("line " + std::to_string(line) + ": " + what), line_(line)
        {
        }

        int line() const noexcept { return line_; }

    private:
        int line_;
    };
}
