#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lcga {

// Problems with input data: malformed files, ragged trajectories, bad indices.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RaggedData : public DataError {
public:
    using DataError::DataError;
};

class DuplicateCell : public DataError {
public:
    using DataError::DataError;
};

class NonNumeric : public DataError {
public:
    using DataError::DataError;
};

class IndexOutOfRange : public DataError {
public:
    using DataError::DataError;
};

class DegreeTooHigh : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Every EM restart for a given K collapsed onto a degenerate component.
class AllRestartsDegenerate : public std::runtime_error {
public:
    AllRestartsDegenerate(int k, const std::string& what)
        : std::runtime_error(what), n_groups(k) {}
    int n_groups;
};

// No candidate K in a scan could be fitted.
class NoModelAvailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateMixing : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace lcga
