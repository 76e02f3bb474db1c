from setuptools import find_packages, setup

__version__ = ""

with open("reidtrack/_version.py", "r") as f:
    exec(f.read())

with open("README.md", "r") as f:
    long_desc = f.read()

packages = [folder for folder in find_packages() if folder[-5:] != ".test"]  # Get rid of test packages

setup(
    name="reidtrack",
    version=__version__,
    description="Multi-person tracking with histogram filters on re-identification embedding maps",
    long_description=long_desc,
    long_description_content_type="text/markdown",
    license="MIT",
    python_requires=">=3.10, <3.13",
    packages=packages,
    install_requires=[
        "filterpy",
        "joblib",
        "matplotlib",
        "numpy<2.1",
        "pandas",
        "pillow",
        "psutil",
        "scipy",
        "torch>=2",
        "tqdm",
        "typing_extensions",
    ],
    package_data={
        "reidtrack.setup": ["default.ini"],
    },
    include_package_data=True,
    entry_points={"console_scripts": ["reidtrack=reidtrack.__main__:main"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3 :: only",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering",
        "Topic :: Scientific/Engineering :: Image Recognition",
        "Operating System :: Unix",
        "Operating System :: Windows",
    ],
)
