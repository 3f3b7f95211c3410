#include <stdio.h>
long update(int step)
{
    if (step <= 1) {
        return 1;
    }
    return step * update(step - 1);
}
int main(void)
{
    int step = 5;
    long pos = update(step);
    printf("%ld\n", pos);
    return 0;
}
