# SPDX-License-Identifier: Apache-2.0
"""Renders the example vocabulary sketches and writes vocabulary.json."""
import json
import math
import pathlib

from PIL import Image, ImageDraw

W, H = 320, 240
HERE = pathlib.Path(__file__).resolve().parent


def circle(d, cx, cy, r):
    d.ellipse([cx - r, cy - r, cx + r, cy + r], outline=0, width=3)


def lines(d, *pts):
    d.line(list(pts), fill=0, width=3, joint="curve")


def house(d):
    lines(d, (90, 120), (90, 210), (230, 210), (230, 120), (90, 120))
    lines(d, (75, 125), (160, 50), (245, 125))
    lines(d, (140, 210), (140, 160), (180, 160), (180, 210))
    d.rectangle([105, 140, 130, 165], outline=0, width=3)


def tree(d):
    lines(d, (150, 210), (150, 140))
    lines(d, (170, 210), (170, 140))
    for cx, cy, r in ((160, 100, 45), (125, 120, 30), (195, 120, 30)):
        circle(d, cx, cy, r)


def cat(d):
    d.ellipse([100, 120, 220, 210], outline=0, width=3)
    circle(d, 160, 90, 35)
    lines(d, (132, 70), (135, 40), (150, 58))
    lines(d, (170, 58), (185, 40), (188, 70))
    lines(d, (220, 180), (260, 150), (265, 120))


def dog(d):
    d.ellipse([90, 120, 220, 180], outline=0, width=3)
    circle(d, 235, 110, 28)
    lines(d, (225, 85), (215, 125))
    for x in (105, 135, 180, 205):
        lines(d, (x, 172), (x, 215))
    lines(d, (90, 140), (60, 115))


def bird(d):
    d.ellipse([110, 110, 210, 170], outline=0, width=3)
    circle(d, 215, 105, 22)
    lines(d, (235, 100), (260, 108), (236, 112))
    lines(d, (130, 130), (160, 95), (185, 130))
    lines(d, (150, 170), (150, 200))
    lines(d, (175, 170), (175, 200))


def fish(d):
    d.ellipse([90, 90, 220, 160], outline=0, width=3)
    lines(d, (92, 125), (50, 95), (50, 155), (92, 125))
    circle(d, 195, 115, 5)


def flower(d):
    lines(d, (160, 215), (160, 120))
    lines(d, (160, 180), (185, 160))
    for k in range(6):
        a = k * math.pi / 3
        circle(d, 160 + 28 * math.cos(a), 95 + 28 * math.sin(a), 16)
    circle(d, 160, 95, 12)


def sun(d):
    circle(d, 160, 120, 40)
    for k in range(10):
        a = k * math.pi / 5
        lines(d, (160 + 55 * math.cos(a), 120 + 55 * math.sin(a)), (160 + 85 * math.cos(a), 120 + 85 * math.sin(a)))


def cloud(d):
    for cx, cy, r in ((120, 130, 30), (160, 110, 40), (205, 130, 30)):
        d.arc([cx - r, cy - r, cx + r, cy + r], 180, 360, fill=0, width=3)
    lines(d, (90, 130), (90, 150), (235, 150), (235, 130))


def car(d):
    lines(d, (60, 170), (60, 135), (110, 130), (135, 95), (205, 95), (230, 130), (265, 135), (265, 170), (60, 170))
    circle(d, 105, 172, 20)
    circle(d, 220, 172, 20)


def boat(d):
    lines(d, (60, 160), (260, 160), (225, 200), (95, 200), (60, 160))
    lines(d, (160, 160), (160, 40))
    lines(d, (160, 45), (230, 145), (160, 145))


def person(d):
    circle(d, 160, 60, 22)
    lines(d, (160, 82), (160, 150))
    lines(d, (120, 110), (160, 95), (200, 110))
    lines(d, (130, 210), (160, 150), (190, 210))


def hare(d):
    d.ellipse([80, 130, 210, 190], outline=0, width=3)
    circle(d, 215, 125, 24)
    lines(d, (205, 105), (195, 45))
    lines(d, (222, 102), (232, 42))
    lines(d, (110, 185), (95, 210))
    lines(d, (190, 185), (205, 210))


def turtle(d):
    d.chord([80, 90, 240, 200], 180, 360, outline=0, width=3)
    circle(d, 258, 138, 16)
    lines(d, (105, 145), (100, 175))
    lines(d, (215, 145), (220, 175))
    lines(d, (80, 145), (60, 150))


def mountain(d):
    lines(d, (30, 200), (120, 70), (170, 140), (215, 90), (290, 200), (30, 200))
    lines(d, (100, 98), (120, 110), (140, 98))


def moon(d):
    d.arc([100, 50, 240, 190], 60, 300, fill=0, width=3)
    d.arc([140, 60, 240, 180], 75, 285, fill=0, width=3)


def star(d):
    pts = []
    for k in range(10):
        r = 80 if k % 2 == 0 else 32
        a = -math.pi / 2 + k * math.pi / 5
        pts.append((160 + r * math.cos(a), 125 + r * math.sin(a)))
    lines(d, *pts, pts[0])


def heart(d):
    d.arc([90, 60, 165, 135], 150, 360, fill=0, width=3)
    d.arc([155, 60, 230, 135], 180, 30, fill=0, width=3)
    lines(d, (95, 115), (160, 200), (225, 115))


def apple(d):
    circle(d, 160, 135, 60)
    lines(d, (160, 78), (165, 45))
    d.ellipse([168, 48, 205, 66], outline=0, width=3)


def cup(d):
    lines(d, (110, 70), (120, 190), (200, 190), (210, 70))
    d.ellipse([108, 62, 212, 78], outline=0, width=3)
    d.arc([185, 95, 245, 155], 270, 90, fill=0, width=3)


def chair(d):
    lines(d, (120, 40), (120, 210))
    lines(d, (120, 130), (210, 130), (210, 210))
    lines(d, (120, 40), (150, 40), (150, 130))
    lines(d, (130, 130), (200, 130))


def umbrella(d):
    d.chord([60, 50, 260, 170], 180, 360, outline=0, width=3)
    lines(d, (160, 110), (160, 195))
    d.arc([140, 180, 160, 205], 0, 180, fill=0, width=3)


def butterfly(d):
    lines(d, (160, 70), (160, 190))
    d.ellipse([75, 60, 158, 130], outline=0, width=3)
    d.ellipse([162, 60, 245, 130], outline=0, width=3)
    d.ellipse([95, 130, 158, 185], outline=0, width=3)
    d.ellipse([162, 130, 225, 185], outline=0, width=3)
    lines(d, (160, 72), (140, 45))
    lines(d, (160, 72), (180, 45))


def rain(d):
    cloud(d)
    for x in range(100, 240, 25):
        lines(d, (x, 165), (x - 10, 190))


ENTRIES = [
    ("house", house, "Draw a square for the walls. Put a triangle on top for the roof. Add a door in the middle of the bottom edge and a small square window beside it."),
    ("tree", tree, "Draw two vertical parallel lines for the trunk. Above them draw three overlapping circles for the leaves, the middle one highest."),
    ("cat", cat, "Draw an oval for the body. Put a circle on top for the head. Add two small triangles on the head for the ears. Draw a curved line from the back of the body for the tail."),
    ("dog", dog, "Draw a horizontal oval for the body. Add a circle at the front end for the head with a drooping line for the ear. Draw four straight legs under the body and a short tail at the back."),
    ("bird", bird, "Draw an oval for the body and a small circle at one end for the head. Add a small triangle beak. Draw a curved wing on the body and two thin legs below."),
    ("fish", fish, "Draw a horizontal oval for the body. Attach a triangle at one end for the tail. Add a small dot near the other end for the eye."),
    ("flower", flower, "Draw a long vertical line for the stem with a short line for a leaf. At the top draw a small circle and surround it with six petals made of circles."),
    ("sun", sun, "Draw a circle. Around it draw short straight rays pointing outward, evenly spaced."),
    ("cloud", cloud, "Draw three bumps side by side, the middle one larger. Close the shape with a flat line at the bottom."),
    ("car", car, "Draw a long rectangle for the body with a smaller raised cabin on top. Add two circles under the body for the wheels."),
    ("boat", boat, "Draw a hull that is wide at the top and narrower at the bottom. Put a vertical mast in the middle and a triangle sail attached to it."),
    ("person", person, "Draw a circle for the head. Draw a vertical line for the body. Add two lines for the arms from the upper body and two lines for the legs from the bottom of the body."),
    ("hare", hare, "Draw an oval for the body. Add a circle for the head at the front. Draw two long straight ears pointing up from the head. Add short legs under the body."),
    ("turtle", turtle, "Draw a half circle for the shell with a flat bottom. Add a small circle for the head at one side. Draw two short legs under the shell and a small tail at the back."),
    ("mountain", mountain, "Draw a zigzag line with two peaks, the left one taller, and close it with a flat base. Draw a small zigzag below the tallest peak for the snow."),
    ("moon", moon, "Draw a large arc like an open circle. Draw a second, smaller arc inside it touching both ends to make a crescent."),
    ("star", star, "Draw five points around a center, alternating between far and near points, and connect them in order to form a five pointed star."),
    ("heart", heart, "Draw two round bumps side by side at the top. From the outer sides draw two lines down that meet in a point at the bottom."),
    ("apple", apple, "Draw a circle for the fruit. Add a short stem on top and a small leaf next to the stem."),
    ("cup", cup, "Draw a flat oval for the rim. From its ends draw two lines down that get slightly closer and join them at the bottom. Add a curved handle on one side."),
    ("chair", chair, "Draw a tall vertical line for the back. Draw the seat as a horizontal line halfway down. Add the legs as vertical lines under the seat."),
    ("umbrella", umbrella, "Draw a half circle for the canopy with a flat bottom edge. Draw a vertical line down from the middle for the handle and curl its end into a hook."),
    ("butterfly", butterfly, "Draw a vertical line for the body. On each side draw a large oval wing on top and a smaller oval wing below. Add two short antennae at the top."),
    ("rain", rain, "Draw a cloud made of bumps with a flat base. Below it draw several short slanted lines for the falling drops."),
]


def main():
    entries = []
    for subject, fn, method in ENTRIES:
        img = Image.new("L", (W, H), 255)
        fn(ImageDraw.Draw(img))
        path = f"images/{subject}.png"
        img.save(HERE / path, optimize=True)
        entries.append({"subject": subject, "image": path, "method": method})
    (HERE / "vocabulary.json").write_text(json.dumps({"entries": entries}, indent=2) + "\n")
    (HERE / "vocabulary-images-only.json").write_text(
        json.dumps({"entries": [{"subject": e["subject"], "image": e["image"]} for e in entries]}, indent=2) + "\n")


if __name__ == "__main__":
    main()
