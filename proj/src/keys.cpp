// Copyright 2026 The aibomgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aibomgen/keys.hpp"

#include <openssl/bio.h>
#include <openssl/evp.h>
#include <openssl/pem.h>

#include <memory>

#include "aibomgen/digest.hpp"
#include "aibomgen/errors.hpp"
#include "aibomgen/util.hpp"

namespace aibomgen {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct CtxDeleter {
    void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct BioDeleter {
    void operator()(BIO* p) const { BIO_free(p); }
};

using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;
using BioPtr = std::unique_ptr<BIO, BioDeleter>;

PkeyPtr pkey_from_private_raw(std::string_view raw)
{
    PkeyPtr key(EVP_PKEY_new_raw_private_key(
        EVP_PKEY_ED25519, nullptr,
        reinterpret_cast<const unsigned char*>(raw.data()), raw.size()));
    if (!key) throw Error(Errc::KeyError, "bad private key material");
    return key;
}

PkeyPtr pkey_from_public_raw(std::string_view raw)
{
    PkeyPtr key(EVP_PKEY_new_raw_public_key(
        EVP_PKEY_ED25519, nullptr,
        reinterpret_cast<const unsigned char*>(raw.data()), raw.size()));
    if (!key) throw Error(Errc::KeyError, "bad public key material");
    return key;
}

std::string raw_public_of(EVP_PKEY* key)
{
    size_t len = kEd25519KeyBytes;
    std::string out(len, '\0');
    if (EVP_PKEY_get_raw_public_key(
            key, reinterpret_cast<unsigned char*>(out.data()), &len) != 1 ||
        len != kEd25519KeyBytes)
        throw Error(Errc::KeyError, "cannot extract raw public key");
    return out;
}

std::string raw_private_of(EVP_PKEY* key)
{
    size_t len = kEd25519KeyBytes;
    std::string out(len, '\0');
    if (EVP_PKEY_get_raw_private_key(
            key, reinterpret_cast<unsigned char*>(out.data()), &len) != 1 ||
        len != kEd25519KeyBytes)
        throw Error(Errc::KeyError, "cannot extract raw private key");
    return out;
}

std::string pem_of_public(EVP_PKEY* key)
{
    BioPtr bio(BIO_new(BIO_s_mem()));
    if (!bio || PEM_write_bio_PUBKEY(bio.get(), key) != 1)
        throw Error(Errc::KeyError, "cannot encode public key PEM");
    char* data = nullptr;
    long len = BIO_get_mem_data(bio.get(), &data);
    return std::string(data, size_t(len));
}

std::string pem_of_private(EVP_PKEY* key)
{
    BioPtr bio(BIO_new(BIO_s_mem()));
    if (!bio || PEM_write_bio_PrivateKey(bio.get(), key, nullptr, nullptr, 0,
                                         nullptr, nullptr) != 1)
        throw Error(Errc::KeyError, "cannot encode private key PEM");
    char* data = nullptr;
    long len = BIO_get_mem_data(bio.get(), &data);
    return std::string(data, size_t(len));
}

PkeyPtr pem_to_pkey(const std::string& pem, bool private_key)
{
    BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
    if (!bio) throw Error(Errc::KeyError, "bio alloc");
    EVP_PKEY* raw = private_key
                        ? PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, nullptr)
                        : PEM_read_bio_PUBKEY(bio.get(), nullptr, nullptr, nullptr);
    PkeyPtr key(raw);
    if (!key || EVP_PKEY_id(key.get()) != EVP_PKEY_ED25519)
        throw Error(Errc::KeyError, "PEM does not contain an Ed25519 key");
    return key;
}

}  // namespace

KeyPair KeyPair::generate()
{
    std::unique_ptr<EVP_PKEY_CTX, CtxDeleter> ctx(
        EVP_PKEY_CTX_new_id(EVP_PKEY_ED25519, nullptr));
    EVP_PKEY* raw = nullptr;
    if (!ctx || EVP_PKEY_keygen_init(ctx.get()) != 1 ||
        EVP_PKEY_keygen(ctx.get(), &raw) != 1)
        throw Error(Errc::KeyError, "key generation failed");
    PkeyPtr key(raw);

    KeyPair pair;
    pair.public_raw_ = raw_public_of(key.get());
    pair.private_raw_ = raw_private_of(key.get());
    pair.key_id_ = compute_digest(pair.public_raw_).hex;
    return pair;
}

KeyPair KeyPair::from_public_raw(std::string_view raw32)
{
    if (raw32.size() != kEd25519KeyBytes)
        throw Error(Errc::KeyError, "public key must be 32 bytes");
    KeyPair pair;
    pair.public_raw_ = std::string(raw32);
    pair.key_id_ = compute_digest(pair.public_raw_).hex;
    return pair;
}

KeyPair KeyPair::from_public_pem(const std::string& pem)
{
    PkeyPtr key = pem_to_pkey(pem, false);
    return from_public_raw(raw_public_of(key.get()));
}

KeyPair KeyPair::load(const std::string& private_pem_path,
                      const std::string& public_pem_path)
{
    PkeyPtr priv = pem_to_pkey(read_file(private_pem_path), true);
    PkeyPtr pub = pem_to_pkey(read_file(public_pem_path), false);
    KeyPair pair;
    pair.private_raw_ = raw_private_of(priv.get());
    pair.public_raw_ = raw_public_of(pub.get());
    if (raw_public_of(priv.get()) != pair.public_raw_)
        throw Error(Errc::KeyError, "private and public PEM files do not match");
    pair.key_id_ = compute_digest(pair.public_raw_).hex;
    return pair;
}

void KeyPair::save(const std::string& private_pem_path,
                   const std::string& public_pem_path) const
{
    if (!can_sign()) throw Error(Errc::KeyError, "no private key to save");
    PkeyPtr priv = pkey_from_private_raw(private_raw_);
    write_file_atomic(private_pem_path, pem_of_private(priv.get()));
    write_file_atomic(public_pem_path, public_pem());
}

std::string KeyPair::public_pem() const
{
    PkeyPtr pub = pkey_from_public_raw(public_raw_);
    return pem_of_public(pub.get());
}

std::string KeyPair::sign(std::string_view message) const
{
    if (!can_sign()) throw Error(Errc::KeyError, "signing key not available");
    PkeyPtr key = pkey_from_private_raw(private_raw_);
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx ||
        EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
        throw Error(Errc::KeyError, "sign init failed");
    size_t sig_len = kEd25519SigBytes;
    std::string sig(sig_len, '\0');
    if (EVP_DigestSign(ctx.get(), reinterpret_cast<unsigned char*>(sig.data()),
                       &sig_len,
                       reinterpret_cast<const unsigned char*>(message.data()),
                       message.size()) != 1 ||
        sig_len != kEd25519SigBytes)
        throw Error(Errc::KeyError, "signing failed");
    return sig;
}

bool KeyPair::verify(std::string_view message, std::string_view signature) const
{
    if (signature.size() != kEd25519SigBytes) return false;
    if (public_raw_.size() != kEd25519KeyBytes) return false;
    PkeyPtr key;
    try {
        key = pkey_from_public_raw(public_raw_);
    } catch (const Error&) {
        return false;
    }
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx ||
        EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
        return false;
    return EVP_DigestVerify(
               ctx.get(),
               reinterpret_cast<const unsigned char*>(signature.data()),
               signature.size(),
               reinterpret_cast<const unsigned char*>(message.data()),
               message.size()) == 1;
}

}  // namespace aibomgen
