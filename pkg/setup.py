import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="LPLab",
    version="0.1.0",
    author="LPLab contributors",
    description="A numerical lab for Littlewood-Paley decompositions, Besov and "
    "Triebel-Lizorkin norms and a band-translating Fourier multiplier",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8",
    install_requires=["numpy", "scipy"],
    extras_require={"test": ["pytest", "hypothesis"]},
)
