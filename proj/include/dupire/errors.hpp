#pragma once

#include <stdexcept>
#include <string>

namespace dupire {

// Base of every error raised by the library. Callers that only need to know
// "this point failed" catch this; the subclasses carry the reason.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

// Argument outside the finiteness strip of the mgf (or otherwise outside the
// domain where the quantity exists).
class DomainError : public Error {
public:
    using Error::Error;
};

class NoExplosionError : public Error {
public:
    using Error::Error;
};

class DegenerateSlopeError : public Error {
public:
    using Error::Error;
};

// The mgf stays bounded at the critical moment, so the saddle formula does
// not apply (normal inverse Gaussian).
class NoBlowupError : public Error {
public:
    using Error::Error;
};

class KTooSmallError : public Error {
public:
    using Error::Error;
};

class SmallMaturityError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class ContourError : public Error {
public:
    using Error::Error;
};

class RatioInstabilityError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

// |psi| crossed the blow-up threshold before the requested horizon.
class BlowupEncountered : public Error {
public:
    BlowupEncountered(double t_blow, const std::string& what)
        : Error(what), t_blow_(t_blow) {}

    double t_blow() const noexcept { return t_blow_; }

private:
    double t_blow_;
};

}  // namespace dupire
