#include <stdio.h>
enum Rect { LOW, MID, HIGH };
enum Rect process(int step)
{
    enum Rect num = LOW;
    if (step > 61) {
        num = HIGH;
    } else if (step > 35) {
        num = MID;
    }
    return num;
}
int main(void)
{
    int step = 2;
    enum Rect k = process(step);
    printf("%d\n", (int)k);
    return 0;
}
